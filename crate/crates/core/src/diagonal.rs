//! Diagonal operators `x^α ↦ t_α x^α`.
//!
//! Such an operator is `Σ (c_α/α!) x^α ∂^α`, and the two sequences are a
//! binomial-transform pair:
//! `t_α = Σ_{β≼α} binom(α,β) c_β` and `c_α = Σ_{β≼α} (−1)^{|α−β|} binom(α,β) t_β`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::exponent::Exponent;
use crate::operator::DiffOperator;
use crate::poly::Polynomial;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// Eigenvalues `t_α`.
    Diagonal,
    /// Canonical coefficients `c_α`.
    Canonical,
}

/// Dense sequence over `|α| ≤ D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSequence {
    n: usize,
    order: u32,
    kind: SequenceKind,
    values: BTreeMap<Exponent, Rational>,
}

impl DiagonalSequence {
    pub fn from_fn<F>(n: usize, order: u32, kind: SequenceKind, mut f: F) -> Self
    where
        F: FnMut(&Exponent) -> Rational,
    {
        let values = Exponent::up_to(n, order)
            .into_iter()
            .map(|a| {
                let v = f(&a);
                (a, v)
            })
            .collect();
        DiagonalSequence {
            n,
            order,
            kind,
            values,
        }
    }

    /// Missing entries are zero; entries above `order` are rejected.
    pub fn from_values<I>(n: usize, order: u32, kind: SequenceKind, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut seq = DiagonalSequence::from_fn(n, order, kind, |_| Rational::zero());
        for (a, v) in values {
            check_dim(n, a.dim())?;
            if a.degree() > order {
                return Err(Error::DegreeBudgetExceeded {
                    degree: a.degree(),
                    max_order: order,
                });
            }
            seq.values.insert(a, v);
        }
        Ok(seq)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn get(&self, alpha: &Exponent) -> Rational {
        self.values
            .get(alpha)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn values(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.values.iter()
    }

    /// `c_α = Σ_{β≼α} (−1)^{|α−β|} binom(α,β) t_β`.
    pub fn t_to_c(&self) -> DiagonalSequence {
        self.transform(true, SequenceKind::Canonical)
    }

    /// `t_α = Σ_{β≼α} binom(α,β) c_β`.
    pub fn c_to_t(&self) -> DiagonalSequence {
        self.transform(false, SequenceKind::Diagonal)
    }

    fn transform(&self, alternating: bool, kind: SequenceKind) -> DiagonalSequence {
        DiagonalSequence::from_fn(self.n, self.order, kind, |alpha| {
            let mut acc = Rational::zero();
            for beta in alpha.lower_set() {
                let term = Rational::from_integer(alpha.binomial(&beta)) * self.get(&beta);
                if alternating && (alpha.degree() - beta.degree()) % 2 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
    }

    /// `Σ (c_α/α!) x^α ∂^α` from a canonical-coefficient sequence. A
    /// diagonal-kind input is transformed first.
    pub fn to_canonical(&self) -> DiffOperator {
        let c = match self.kind {
            SequenceKind::Canonical => self.clone(),
            SequenceKind::Diagonal => self.t_to_c(),
        };
        let entries = c.values.iter().map(|(a, v)| {
            let coeff = v / Rational::from_integer(a.factorial());
            (a.clone(), Polynomial::monomial(a.clone(), coeff))
        });
        DiffOperator::from_table(self.n, self.order, entries).expect("dense table fits its order")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::canonical_from_action;
    use crate::poly::int;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    /// Independent oracle: direct alternating binomial summation in i64.
    fn alt_binomial_sum(t: &[i64], k: usize) -> i64 {
        let mut acc = 0i64;
        let mut binom = 1i64;
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
            acc += sign * binom * t[j];
            binom = binom * (k - j) as i64 / (j + 1) as i64;
        }
        acc
    }

    #[test]
    fn identity_sequence() {
        let t = DiagonalSequence::from_fn(2, 4, SequenceKind::Diagonal, |_| Rational::one());
        let c = t.t_to_c();
        for (a, v) in c.values() {
            assert_eq!(*v, if a.is_zero() { int(1) } else { int(0) });
        }
        assert_eq!(c.c_to_t(), t);
        assert_eq!(t.to_canonical(), DiffOperator::identity(2, 4));
    }

    #[test]
    fn powers_of_two() {
        let pow2: Vec<i64> = (0..=8).map(|k| 1 << k).collect();
        let t = DiagonalSequence::from_fn(1, 8, SequenceKind::Diagonal, |a| {
            int(pow2[a.degree() as usize])
        });
        let c = t.t_to_c();
        for k in 0..=8usize {
            assert_eq!(alt_binomial_sum(&pow2, k), 1);
            assert_eq!(c.get(&e(&[k as u32])), int(1));
        }
        let back = DiagonalSequence::from_fn(1, 8, SequenceKind::Canonical, |_| int(1)).c_to_t();
        assert_eq!(back.get(&e(&[5])), int(32));
    }

    #[test]
    fn delta_at_zero() {
        let t = DiagonalSequence::from_fn(1, 6, SequenceKind::Diagonal, |a| {
            if a.is_zero() {
                int(1)
            } else {
                int(0)
            }
        });
        let delta = [1i64, 0, 0, 0, 0, 0, 0];
        let c = t.t_to_c();
        for k in 0..=6usize {
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(alt_binomial_sum(&delta, k), expect);
            assert_eq!(c.get(&e(&[k as u32])), int(expect));
        }
    }

    #[test]
    fn single_mixed_coefficient() {
        let c =
            DiagonalSequence::from_values(2, 4, SequenceKind::Canonical, [(e(&[1, 1]), int(1))])
                .unwrap();
        let t = c.c_to_t();
        for (a, v) in t.values() {
            let expect = if e(&[1, 1]).divides(a) {
                Rational::from_integer(a.binomial(&e(&[1, 1])))
            } else {
                int(0)
            };
            assert_eq!(*v, expect, "at {a}");
        }
    }

    #[test]
    fn euler_operator_from_c() {
        let c = DiagonalSequence::from_values(1, 4, SequenceKind::Canonical, [(e(&[1]), int(1))])
            .unwrap();
        let op = c.to_canonical();
        let x = Polynomial::var(1, 0);
        assert_eq!(op.coeff(&e(&[1])), x);
        let t = c.c_to_t();
        for k in 0..=4u32 {
            assert_eq!(t.get(&e(&[k])), int(k as i64));
            assert_eq!(op.apply(&x.pow(k)).unwrap(), x.pow(k).scale(&int(k as i64)));
        }
    }

    #[test]
    fn all_ones_c_doubles() {
        let c = DiagonalSequence::from_fn(1, 5, SequenceKind::Canonical, |_| int(1));
        let op = c.to_canonical();
        let x = Polynomial::var(1, 0);
        for k in 0..=5u32 {
            assert_eq!(op.apply(&x.pow(k)).unwrap(), x.pow(k).scale(&int(1 << k)));
        }
    }

    #[test]
    fn rejects_out_of_range_entries() {
        assert!(
            DiagonalSequence::from_values(1, 2, SequenceKind::Diagonal, [(e(&[3]), int(1))])
                .is_err()
        );
        assert!(DiagonalSequence::from_values(
            1,
            2,
            SequenceKind::Diagonal,
            [(e(&[1, 0]), int(1))]
        )
        .is_err());
    }

    fn sequence() -> impl Strategy<Value = DiagonalSequence> {
        (1usize..=3, 0u32..=5).prop_flat_map(|(n, d)| {
            let len = Exponent::up_to(n, d).len();
            proptest::collection::vec((-9i64..=9, 1i64..=5), len).prop_map(move |vals| {
                let alphas = Exponent::up_to(n, d);
                DiagonalSequence::from_values(
                    n,
                    d,
                    SequenceKind::Diagonal,
                    alphas
                        .into_iter()
                        .zip(vals)
                        .map(|(a, (p, q))| (a, Rational::new(BigInt::from(p), BigInt::from(q)))),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn roundtrips(t in sequence()) {
            prop_assert_eq!(t.t_to_c().c_to_t(), t.clone());
            let as_c = DiagonalSequence::from_values(t.dim(), t.order(), SequenceKind::Canonical,
                t.values().map(|(a, v)| (a.clone(), v.clone()))).unwrap();
            prop_assert_eq!(as_c.c_to_t().t_to_c(), as_c);
        }

        #[test]
        fn canonical_acts_diagonally(t in sequence()) {
            let op = t.to_canonical();
            for (a, v) in t.values() {
                let m = Polynomial::monomial(a.clone(), int(1));
                prop_assert_eq!(op.apply(&m).unwrap(), m.scale(v));
            }
        }

        #[test]
        fn matches_canonical_recovery(t in sequence()) {
            let recovered = canonical_from_action(
                |a| Polynomial::monomial(a.clone(), t.get(a)),
                t.dim(),
                t.order(),
            ).unwrap();
            prop_assert_eq!(recovered, t.to_canonical());
        }
    }
}
