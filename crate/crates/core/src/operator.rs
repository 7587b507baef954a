//! Linear operators on `ℚ[x₁,…,xₙ]` in canonical form `T = Σ q_α ∂^α`.
//!
//! Every linear map on the polynomial ring has a unique expansion of this
//! form, but the sum is infinite in general. A [`DiffOperator`] stores the
//! coefficients `q_α` for `|α| ≤ D` and is exact on polynomials of degree at
//! most `D`, where all higher derivatives vanish. Inputs above that degree are
//! rejected instead of being silently truncated.
//!
//! Finite-rank operators `f ↦ Σ lᵢ(f)·pᵢ` with atomic functionals `lᵢ` live
//! here too. They are positivity preservers when the atoms sit in `K` and
//! `pᵢ ≥ 0` on `K`, but they never have infinite-dimensional image, so the
//! identity is not one of them.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::constgroup::ConstOperator;
use crate::error::{check_dim, Error, Result};
use crate::exponent::Exponent;
use crate::poly::{Degree, Polynomial};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    n: usize,
    max_order: u32,
    table: BTreeMap<Exponent, Polynomial>,
}

impl DiffOperator {
    pub fn zero(n: usize, max_order: u32) -> Self {
        DiffOperator {
            n,
            max_order,
            table: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, max_order: u32) -> Self {
        let mut t = DiffOperator::zero(n, max_order);
        t.table.insert(Exponent::zero(n), Polynomial::one(n));
        t
    }

    /// Builds an operator from `(α, q_α)` pairs. Repeated `α` are summed.
    pub fn from_table<I>(n: usize, max_order: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Polynomial)>,
    {
        let mut t = DiffOperator::zero(n, max_order);
        for (alpha, q) in entries {
            t.insert(alpha, q)?;
        }
        Ok(t)
    }

    fn insert(&mut self, alpha: Exponent, q: Polynomial) -> Result<()> {
        check_dim(self.n, alpha.dim())?;
        check_dim(self.n, q.dim())?;
        if alpha.degree() > self.max_order {
            return Err(Error::DegreeBudgetExceeded {
                degree: alpha.degree(),
                max_order: self.max_order,
            });
        }
        let merged = match self.table.remove(&alpha) {
            Some(old) => &old + &q,
            None => q,
        };
        if !merged.is_zero() {
            self.table.insert(alpha, merged);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// `q_α`, zero when absent.
    pub fn coeff(&self, alpha: &Exponent) -> Polynomial {
        self.table
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.n))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Exponent, &Polynomial)> {
        self.table.iter()
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, f.dim())?;
        let deg = match f.degree() {
            Degree::NegInfinity => return Ok(Polynomial::zero(self.n)),
            Degree::Finite(d) => d,
        };
        if deg > self.max_order {
            return Err(Error::DegreeBudgetExceeded {
                degree: deg,
                max_order: self.max_order,
            });
        }
        let mut out = Polynomial::zero(self.n);
        for (alpha, q) in self.table.range(..) {
            if alpha.degree() > deg {
                break;
            }
            let d = f.partial(alpha)?;
            if !d.is_zero() {
                out = &out + &(q * &d);
            }
        }
        Ok(out)
    }

    /// `deg q_α ≤ |α|` for every stored `α`, equivalently `T` maps each
    /// `ℝ[x]_{≤d}` into itself.
    pub fn is_degree_preserving(&self) -> bool {
        self.table
            .iter()
            .all(|(alpha, q)| q.degree().at_most(alpha.degree()))
    }

    /// `T_y = Σ q_α(y) ∂^α`.
    pub fn specialize_at(&self, y: &[Rational]) -> Result<ConstOperator> {
        check_dim(self.n, y.len())?;
        let mut entries = Vec::with_capacity(self.table.len());
        for (alpha, q) in &self.table {
            entries.push((alpha.clone(), q.evaluate(y)?));
        }
        ConstOperator::from_table(self.n, self.max_order, entries)
    }

    /// Same operator, viewed at a smaller working order.
    pub fn truncate(&self, max_order: u32) -> DiffOperator {
        DiffOperator {
            n: self.n,
            max_order: max_order.min(self.max_order),
            table: self
                .table
                .iter()
                .filter(|(a, _)| a.degree() <= max_order)
                .map(|(a, q)| (a.clone(), q.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> DiffOperator {
        DiffOperator {
            n: self.n,
            max_order: self.max_order,
            table: if s.is_zero() {
                BTreeMap::new()
            } else {
                self.table
                    .iter()
                    .map(|(a, q)| (a.clone(), q.scale(s)))
                    .collect()
            },
        }
    }

    pub fn checked_add(&self, other: &DiffOperator) -> Result<DiffOperator> {
        check_dim(self.n, other.n)?;
        let mut out = self.truncate(other.max_order);
        let d = out.max_order;
        for (a, q) in other.table.iter().filter(|(a, _)| a.degree() <= d) {
            out.insert(a.clone(), q.clone())?;
        }
        Ok(out)
    }
}

/// Recovers the canonical table of a linear map from its values on monomials.
///
/// Since `∂^β x^α = α!/(α−β)! · x^{α−β}` vanishes unless `β ≼ α`,
/// `T x^α = Σ_{β≼α} q_β · α!/(α−β)! · x^{α−β}`; solving in graded order gives
/// `q_α = (T x^α − Σ_{β≺α} …)/α!`. The result is re-checked against a second
/// round of oracle calls.
pub fn canonical_from_action<F>(action: F, n: usize, max_order: u32) -> Result<DiffOperator>
where
    F: Fn(&Exponent) -> Polynomial,
{
    let mut table: BTreeMap<Exponent, Polynomial> = BTreeMap::new();
    let monomials = Exponent::up_to(n, max_order);
    for alpha in &monomials {
        let image = action(alpha);
        check_dim(n, image.dim())?;
        let mut residual = image;
        for beta in alpha.lower_set() {
            if &beta == alpha {
                continue;
            }
            if let Some(q) = table.get(&beta) {
                let rest = alpha.checked_sub(&beta).expect("β ≼ α");
                let ff = Rational::from_integer(alpha.falling_factorial(&beta));
                let contribution = (q * &Polynomial::monomial(rest, Rational::one())).scale(&ff);
                residual = &residual - &contribution;
            }
        }
        let q_alpha =
            residual.scale(&(Rational::one() / Rational::from_integer(alpha.factorial())));
        if !q_alpha.is_zero() {
            table.insert(alpha.clone(), q_alpha);
        }
    }
    let op = DiffOperator {
        n,
        max_order,
        table,
    };
    for alpha in &monomials {
        let x_alpha = Polynomial::monomial(alpha.clone(), Rational::one());
        if op.apply(&x_alpha)? != action(alpha) {
            return Err(Error::InconsistentAction {
                alpha: alpha.entries().to_vec(),
            });
        }
    }
    Ok(op)
}

/// `l(f) = Σ wᵢ f(zᵢ)` with positive weights: integration against a finite
/// atomic measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicFunctional {
    n: usize,
    atoms: Vec<(Vec<Rational>, Rational)>,
}

impl AtomicFunctional {
    pub fn new(n: usize, atoms: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        for (z, w) in &atoms {
            check_dim(n, z.len())?;
            if !w.is_positive() {
                return Err(Error::InvalidFunctional(format!(
                    "weight {w} is not positive"
                )));
            }
        }
        Ok(AtomicFunctional { n, atoms })
    }

    /// Point evaluation `δ_z`.
    pub fn dirac(z: Vec<Rational>) -> Self {
        AtomicFunctional {
            n: z.len(),
            atoms: vec![(z, Rational::from_integer(1.into()))],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(Vec<Rational>, Rational)] {
        &self.atoms
    }

    pub fn eval(&self, f: &Polynomial) -> Result<Rational> {
        check_dim(self.n, f.dim())?;
        let mut acc = Rational::zero();
        for (z, w) in &self.atoms {
            acc += w * f.evaluate(z)?;
        }
        Ok(acc)
    }
}

/// `f ↦ Σ lᵢ(f)·pᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRankOperator {
    n: usize,
    pairs: Vec<(AtomicFunctional, Polynomial)>,
}

impl FiniteRankOperator {
    pub fn new(n: usize, pairs: Vec<(AtomicFunctional, Polynomial)>) -> Result<Self> {
        for (l, p) in &pairs {
            check_dim(n, l.dim())?;
            check_dim(n, p.dim())?;
        }
        Ok(FiniteRankOperator { n, pairs })
    }

    pub fn pairs(&self) -> &[(AtomicFunctional, Polynomial)] {
        &self.pairs
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, f.dim())?;
        let mut out = Polynomial::zero(self.n);
        for (l, p) in &self.pairs {
            out = &out + &p.scale(&l.eval(f)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn x1() -> Polynomial {
        Polynomial::var(1, 0)
    }

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    fn euler() -> DiffOperator {
        DiffOperator::from_table(1, 6, [(e(&[1]), x1())]).unwrap()
    }

    #[test]
    fn apply_basic() {
        let f = &x1().pow(3) + &Polynomial::one(1);
        assert_eq!(DiffOperator::identity(1, 4).apply(&f).unwrap(), f);
        let d = DiffOperator::from_table(1, 4, [(e(&[1]), Polynomial::one(1))]).unwrap();
        assert_eq!(d.apply(&x1().pow(2)).unwrap(), x1().scale(&int(2)));
        assert_eq!(
            euler().apply(&x1().pow(3)).unwrap(),
            x1().pow(3).scale(&int(3))
        );
    }

    #[test]
    fn apply_rejects_high_degree() {
        let t = DiffOperator::identity(1, 2);
        assert_eq!(
            t.apply(&x1().pow(3)),
            Err(Error::DegreeBudgetExceeded {
                degree: 3,
                max_order: 2
            })
        );
        assert!(t.apply(&Polynomial::var(2, 0)).is_err());
    }

    #[test]
    fn canonical_identity_and_shift() {
        let id = canonical_from_action(|a| Polynomial::monomial(a.clone(), int(1)), 2, 4).unwrap();
        assert_eq!(id, DiffOperator::identity(2, 4));

        // p(x) ↦ p(x+1): q_k = 1/k!
        let shift = canonical_from_action(
            |a| {
                Polynomial::monomial(a.clone(), int(1))
                    .taylor_shift(&[int(1)])
                    .unwrap()
            },
            1,
            5,
        )
        .unwrap();
        for k in 0..=5u32 {
            let expect = Rational::from_integer(1.into())
                / Rational::from_integer(crate::exponent::factorial(k));
            assert_eq!(shift.coeff(&e(&[k])), Polynomial::constant(1, expect));
        }
    }

    #[test]
    fn canonical_of_doubling_diagonal() {
        // x^k ↦ 2^k x^k gives q_0 = 1, q_1 = x, q_2 = x²/2.
        let t = canonical_from_action(
            |a| Polynomial::monomial(a.clone(), int(1 << a.degree())),
            1,
            2,
        )
        .unwrap();
        assert_eq!(t.coeff(&e(&[0])), Polynomial::one(1));
        assert_eq!(t.coeff(&e(&[1])), x1());
        assert_eq!(t.coeff(&e(&[2])), x1().pow(2).scale(&q(1, 2)));
    }

    #[test]
    fn canonical_detects_inconsistent_oracle() {
        use std::cell::Cell;
        let calls = Cell::new(0u32);
        let res = canonical_from_action(
            |a| {
                calls.set(calls.get() + 1);
                Polynomial::monomial(a.clone(), int(calls.get() as i64))
            },
            1,
            2,
        );
        assert!(matches!(res, Err(Error::InconsistentAction { .. })));
    }

    #[test]
    fn degree_preservation() {
        assert!(DiffOperator::identity(2, 3).is_degree_preserving());
        assert!(euler().is_degree_preserving());
        let bad = DiffOperator::from_table(1, 3, [(e(&[1]), x1().pow(2))]).unwrap();
        assert!(!bad.is_degree_preserving());
    }

    #[test]
    fn specialization() {
        let id = DiffOperator::identity(1, 3)
            .specialize_at(&[int(7)])
            .unwrap();
        assert_eq!(id.coeff(&e(&[0])), int(1));
        assert_eq!(id.entries().count(), 1);

        let t = euler().specialize_at(&[int(2)]).unwrap();
        assert_eq!(t.coeff(&e(&[1])), int(2));

        let t = DiffOperator::from_table(1, 4, [(e(&[2]), x1().pow(2)), (e(&[1]), x1())])
            .unwrap()
            .specialize_at(&[int(3)])
            .unwrap();
        assert_eq!(t.coeff(&e(&[2])), int(9));
        assert_eq!(t.coeff(&e(&[1])), int(3));
        assert_eq!(t.entries().count(), 2);
    }

    #[test]
    fn finite_rank() {
        let f = &x1().pow(2) + &x1();
        let delta0 = FiniteRankOperator::new(
            1,
            vec![(AtomicFunctional::dirac(vec![int(0)]), Polynomial::one(1))],
        )
        .unwrap();
        assert_eq!(
            delta0.apply(&(&f + &Polynomial::one(1))).unwrap(),
            Polynomial::one(1)
        );

        let l = AtomicFunctional::new(1, vec![(vec![int(1)], int(2))]).unwrap();
        let t = FiniteRankOperator::new(1, vec![(l, x1().pow(2))]).unwrap();
        assert_eq!(t.apply(&x1()).unwrap(), x1().pow(2).scale(&int(2)));

        let empty = FiniteRankOperator::new(1, vec![]).unwrap();
        assert!(empty.apply(&f).unwrap().is_zero());

        assert!(AtomicFunctional::new(1, vec![(vec![int(0)], int(0))]).is_err());
    }

    #[test]
    fn finite_rank_preserves_positivity_on_half_line() {
        // Atoms in K = [0, ∞) and pᵢ ≥ 0 there: x·(x−1)², and a square.
        let l1 = AtomicFunctional::new(1, vec![(vec![int(0)], int(1)), (vec![q(5, 2)], q(1, 3))])
            .unwrap();
        let l2 = AtomicFunctional::dirac(vec![int(4)]);
        let p1 = &x1() * &(&x1() - &Polynomial::one(1)).pow(2);
        let p2 = (&x1() - &Polynomial::constant(1, int(2))).pow(2);
        let t = FiniteRankOperator::new(1, vec![(l1, p1), (l2, p2)]).unwrap();
        // f ≥ 0 on [0, ∞): x, x(x−3)², (x−1)², x³ + 1
        let fs = [
            x1(),
            &x1() * &(&x1() - &Polynomial::constant(1, int(3))).pow(2),
            (&x1() - &Polynomial::one(1)).pow(2),
            &x1().pow(3) + &Polynomial::one(1),
        ];
        let samples: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        for f in &fs {
            assert!(samples
                .iter()
                .all(|&s| f.evaluate_f64(&[s]).unwrap() >= 0.0));
            let g = t.apply(f).unwrap();
            for &s in &samples {
                assert!(g.evaluate_f64(&[s]).unwrap() >= -1e-12, "{g} at {s}");
            }
        }
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-5i64..=5, 1i64..=3).prop_map(|(a, b)| q(a, b))
    }

    fn poly(n: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
        let exps = Exponent::up_to(n, max_deg);
        let len = exps.len();
        proptest::collection::vec((0..len, rational()), 0..5).prop_map(move |pairs| {
            Polynomial::from_terms(n, pairs.into_iter().map(|(i, c)| (exps[i].clone(), c))).unwrap()
        })
    }

    fn operator() -> impl Strategy<Value = DiffOperator> {
        (1usize..=2, 0u32..=5).prop_flat_map(|(n, d)| {
            let alphas = Exponent::up_to(n, d);
            let len = alphas.len();
            proptest::collection::vec((0..len, poly(n, 3)), 0..6).prop_map(move |pairs| {
                DiffOperator::from_table(
                    n,
                    d,
                    pairs.into_iter().map(|(i, p)| (alphas[i].clone(), p)),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn canonical_roundtrip(t in operator()) {
            let back = canonical_from_action(
                |a| t.apply(&Polynomial::monomial(a.clone(), int(1))).unwrap(),
                t.dim(),
                t.max_order(),
            ).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn freezing_identity(
            (t, f, y) in operator().prop_flat_map(|t| {
                let n = t.dim();
                let d = t.max_order();
                (Just(t), poly(n, d), proptest::collection::vec(rational(), n))
            })
        ) {
            let lhs = t.apply(&f).unwrap().evaluate(&y).unwrap();
            let ty = t.specialize_at(&y).unwrap();
            let rhs = ty.apply(&f).unwrap().evaluate(&y).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn degree_preserving_never_raises_degree(
            (t, f) in operator().prop_flat_map(|t| {
                let n = t.dim();
                let d = t.max_order();
                (Just(t), poly(n, d))
            })
        ) {
            if t.is_degree_preserving() {
                prop_assert!(t.apply(&f).unwrap().degree() <= f.degree());
            }
        }
    }
}
