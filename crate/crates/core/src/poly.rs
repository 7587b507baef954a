//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_dim, Result};
use crate::exponent::Exponent;
use crate::Rational;

/// Total degree. The zero polynomial has degree [`Degree::NegInfinity`],
/// which compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// `true` when the degree is at most `d`.
    pub fn at_most(self, d: u32) -> bool {
        self <= Degree::Finite(d)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// An element of `ℚ[x₁,…,xₙ]`. No stored coefficient is ever zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Polynomial::monomial(Exponent::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Polynomial::constant(n, Rational::one())
    }

    /// The coordinate function `x_i` (zero-based `i`).
    pub fn var(n: usize, i: usize) -> Self {
        Polynomial::monomial(Exponent::unit(n, i), Rational::one())
    }

    pub fn monomial(alpha: Exponent, c: Rational) -> Self {
        let n = alpha.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Polynomial { n, terms }
    }

    /// Builds a polynomial from `(α, c)` pairs, summing repeated exponents.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Polynomial::zero(n);
        for (alpha, c) in terms {
            check_dim(n, alpha.dim())?;
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Univariate convenience: `Σ coeffs[k]·x^k`.
    pub fn univariate(coeffs: &[Rational]) -> Self {
        let mut p = Polynomial::zero(1);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Exponent::new(vec![k as u32]), c.clone());
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |a| Degree::Finite(a.degree()))
    }

    pub fn coeff(&self, alpha: &Exponent) -> Rational {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add_term(&mut self, alpha: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut out = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.add_term(a.add(b), c * d);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂^α f`, with falling-factorial coefficients.
    pub fn partial(&self, alpha: &Exponent) -> Result<Polynomial> {
        check_dim(self.n, alpha.dim())?;
        let mut out = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            if let Some(rest) = a.checked_sub(alpha) {
                let ff = Rational::from_integer(a.falling_factorial(alpha));
                out.add_term(rest, c * ff);
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, y: &[Rational]) -> Result<Rational> {
        check_dim(self.n, y.len())?;
        let mut acc = Rational::zero();
        for (a, c) in &self.terms {
            let mut term = c.clone();
            for (yi, &e) in y.iter().zip(a.entries()) {
                if e > 0 {
                    term *= num_traits::pow(yi.clone(), e as usize);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.n, y.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(a, c)| {
                let m: f64 = y
                    .iter()
                    .zip(a.entries())
                    .map(|(yi, &e)| yi.powi(e as i32))
                    .product();
                rational_to_f64(c) * m
            })
            .sum())
    }

    /// `g(u) = f(u + y)`.
    pub fn taylor_shift(&self, y: &[Rational]) -> Result<Polynomial> {
        check_dim(self.n, y.len())?;
        let mut out = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            // Π_i (u_i + y_i)^{a_i} expanded binomially.
            for beta in a.lower_set() {
                let mut coeff = c * Rational::from_integer(a.binomial(&beta));
                for ((yi, &ai), &bi) in y.iter().zip(a.entries()).zip(beta.entries()) {
                    let e = (ai - bi) as usize;
                    if e > 0 {
                        coeff *= num_traits::pow(yi.clone(), e);
                    }
                }
                out.add_term(beta, coeff);
            }
        }
        Ok(out)
    }

    pub fn to_approx(&self) -> ApproxPolynomial {
        ApproxPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), rational_to_f64(c)))
                .collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    /// Panics on dimension mismatch; use [`Polynomial::checked_add`] otherwise.
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial dimensions differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial dimensions differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial dimensions differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest degree first reads more naturally.
        for (i, (a, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mag = c.abs();
            let unit = mag.is_one();
            if !unit || a.is_zero() {
                write!(f, "{mag}")?;
            }
            let mut first = unit;
            for (v, &e) in a.entries().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "x{}", v + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Floating-point polynomial, produced only by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxPolynomial {
    pub n: usize,
    pub terms: BTreeMap<Exponent, f64>,
}

impl ApproxPolynomial {
    pub fn coeff(&self, alpha: &Exponent) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// `max_α |self_α − other_α|`.
    pub fn max_abs_diff(&self, other: &ApproxPolynomial) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|a| (self.coeff(a) - other.coeff(a)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Exact dyadic rational image of every coefficient.
    pub fn to_exact(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for (a, &c) in &self.terms {
            p.add_term(a.clone(), f64_to_rational(c));
        }
        p
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: divide after scaling.
        let num = r.numer().to_f64().unwrap_or(f64::NAN);
        let den = r.denom().to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Exact rational value of a finite float (zero for non-finite input).
pub(crate) fn f64_to_rational(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

#[cfg(test)]
pub(crate) fn int(k: i64) -> Rational {
    Rational::from_integer(k.into())
}
