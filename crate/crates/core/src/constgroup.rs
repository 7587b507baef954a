//! Constant-coefficient operators `Σ a_α ∂^α` truncated at a fixed order.
//!
//! Operators with `a_0 = 1` form a commutative group under composition and
//! those with `a_0 = 0` form its Lie algebra. An algebra element strictly lowers
//! degree, so `Aᵏ` has no terms of order below `k` and the series for `exp` and
//! `log` are finite sums at every truncation order. All results here are exact.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::exponent::Exponent;
use crate::operator::DiffOperator;
use crate::poly::{f64_to_rational, rational_to_f64, Degree, Polynomial};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstKind {
    /// `a_0 = 1`
    GroupElement,
    /// `a_0 = 0`
    AlgebraElement,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstOperator {
    n: usize,
    max_order: u32,
    table: BTreeMap<Exponent, Rational>,
}

impl ConstOperator {
    pub fn zero(n: usize, max_order: u32) -> Self {
        ConstOperator {
            n,
            max_order,
            table: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, max_order: u32) -> Self {
        let mut t = ConstOperator::zero(n, max_order);
        t.table.insert(Exponent::zero(n), Rational::one());
        t
    }

    /// `∂^α` alone.
    pub fn partial(alpha: Exponent, max_order: u32) -> Result<Self> {
        let n = alpha.dim();
        ConstOperator::from_table(n, max_order, [(alpha, Rational::one())])
    }

    /// Entries with `|α| > max_order` are rejected; zero entries are dropped.
    pub fn from_table<I>(n: usize, max_order: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut t = ConstOperator::zero(n, max_order);
        for (alpha, a) in entries {
            check_dim(n, alpha.dim())?;
            if alpha.degree() > max_order {
                return Err(Error::DegreeBudgetExceeded {
                    degree: alpha.degree(),
                    max_order,
                });
            }
            t.add_entry(alpha, a);
        }
        Ok(t)
    }

    fn add_entry(&mut self, alpha: Exponent, a: Rational) {
        if a.is_zero() {
            return;
        }
        let v = self
            .table
            .entry(alpha.clone())
            .or_insert_with(Rational::zero);
        *v += a;
        if v.is_zero() {
            self.table.remove(&alpha);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn coeff(&self, alpha: &Exponent) -> Rational {
        self.table
            .get(alpha)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Exponent::zero(self.n))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.table.iter()
    }

    pub fn kind(&self) -> ConstKind {
        let a0 = self.constant_term();
        if a0.is_one() {
            ConstKind::GroupElement
        } else if a0.is_zero() {
            ConstKind::AlgebraElement
        } else {
            ConstKind::General
        }
    }

    pub fn truncate(&self, max_order: u32) -> ConstOperator {
        ConstOperator {
            n: self.n,
            max_order: max_order.min(self.max_order),
            table: self
                .table
                .iter()
                .filter(|(a, _)| a.degree() <= max_order)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> ConstOperator {
        let mut out = ConstOperator::zero(self.n, self.max_order);
        for (a, c) in &self.table {
            out.add_entry(a.clone(), c * s);
        }
        out
    }

    pub fn checked_add(&self, other: &ConstOperator) -> Result<ConstOperator> {
        check_dim(self.n, other.n)?;
        let mut out = self.truncate(other.max_order);
        let d = out.max_order;
        for (a, c) in other.table.iter().filter(|(a, _)| a.degree() <= d) {
            out.add_entry(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &ConstOperator) -> Result<ConstOperator> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    /// Composition, i.e. the product of symbols, truncated to the smaller order.
    pub fn compose(&self, other: &ConstOperator) -> Result<ConstOperator> {
        check_dim(self.n, other.n)?;
        let d = self.max_order.min(other.max_order);
        let mut out = ConstOperator::zero(self.n, d);
        for (a, x) in &self.table {
            if a.degree() > d {
                break;
            }
            for (b, y) in &other.table {
                if a.degree() + b.degree() > d {
                    break;
                }
                out.add_entry(a.add(b), x * y);
            }
        }
        Ok(out)
    }

    /// `exp A = Σ_{k=0}^{D} Aᵏ/k!`, exact at order `D`.
    pub fn exp(&self) -> Result<ConstOperator> {
        if self.kind() != ConstKind::AlgebraElement {
            return Err(Error::NotAlgebraElement);
        }
        let d = self.max_order;
        let mut sum = ConstOperator::identity(self.n, d);
        let mut term = ConstOperator::identity(self.n, d);
        for k in 1..=d {
            term = term
                .compose(self)?
                .scale(&(Rational::one() / Rational::from_integer(k.into())));
            if term.table.is_empty() {
                break;
            }
            sum = sum.checked_add(&term)?;
        }
        Ok(sum)
    }

    /// `exp(tA)` for exact rational `t`.
    pub fn exp_scaled(&self, t: &Rational) -> Result<ConstOperator> {
        self.scale(t).exp()
    }

    /// `log T = −Σ_{k=1}^{D} (1−T)ᵏ/k`, exact at order `D`.
    pub fn log(&self) -> Result<ConstOperator> {
        if self.kind() != ConstKind::GroupElement {
            return Err(Error::NotGroupElement);
        }
        let d = self.max_order;
        let u = ConstOperator::identity(self.n, d).checked_sub(self)?;
        let mut sum = ConstOperator::zero(self.n, d);
        let mut power = ConstOperator::identity(self.n, d);
        for k in 1..=d {
            power = power.compose(&u)?;
            if power.table.is_empty() {
                break;
            }
            sum = sum
                .checked_sub(&power.scale(&(Rational::one() / Rational::from_integer(k.into()))))?;
        }
        Ok(sum)
    }

    /// Float table of `exp(tA)` for real `t`, accurate to about 1e−12
    /// relative. Only used for sampling semigroups at irrational times.
    pub fn exp_scaled_f64(&self, t: f64) -> Result<BTreeMap<Exponent, f64>> {
        let t_exact = f64_to_rational(t);
        let e = self.exp_scaled(&t_exact)?;
        Ok(e.table
            .iter()
            .map(|(a, c)| (a.clone(), rational_to_f64(c)))
            .collect())
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
        for (a, c) in &self.table {
            if a.degree() > deg {
                break;
            }
            out = &out + &f.partial(a)?.scale(c);
        }
        Ok(out)
    }

    pub fn to_diff_operator(&self) -> DiffOperator {
        DiffOperator::from_table(
            self.n,
            self.max_order,
            self.table
                .iter()
                .map(|(a, c)| (a.clone(), Polynomial::constant(self.n, c.clone()))),
        )
        .expect("table already validated")
    }
}
