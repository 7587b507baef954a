//! Multi-indices `α ∈ ℕ₀ⁿ` and the combinatorics attached to them.
//!
//! Exponents are ordered graded-lexicographically: first by total degree,
//! then, within a degree, with larger powers of `x₁` first. For `n = 2`
//! the order starts `1, x₁, x₂, x₁², x₁x₂, x₂², …`. Every map keyed by
//! [`Exponent`] iterates in this order, and moment matrices are indexed by it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    /// The unit multi-index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|α|`
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `α!` as the product of componentwise factorials.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .map(|&e| factorial(e))
            .fold(BigInt::one(), |acc, f| acc * f)
    }

    /// Componentwise partial order `β ≼ α`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        if !other.divides(self) {
            return None;
        }
        Some(Exponent(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.0.len(), other.0.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `binom(α, β) = Π binom(α_i, β_i)`, zero unless `β ≼ α`.
    pub fn binomial(&self, beta: &Exponent) -> BigInt {
        if !beta.divides(self) {
            return BigInt::from(0);
        }
        self.0
            .iter()
            .zip(&beta.0)
            .map(|(&a, &b)| binomial(a, b))
            .fold(BigInt::one(), |acc, c| acc * c)
    }

    /// Falling factorial `α!/(α−β)!`, the coefficient produced by `∂^β x^α`.
    pub fn falling_factorial(&self, beta: &Exponent) -> BigInt {
        if !beta.divides(self) {
            return BigInt::from(0);
        }
        let mut acc = BigInt::one();
        for (&a, &b) in self.0.iter().zip(&beta.0) {
            for k in (a - b + 1)..=a {
                acc *= k;
            }
        }
        acc
    }

    /// All `β ≼ α`, in graded order.
    pub fn lower_set(&self) -> Vec<Exponent> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &a in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for prefix in &out {
                for k in 0..=a {
                    let mut p = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        let mut set: Vec<Exponent> = out.into_iter().map(Exponent).collect();
        set.sort();
        set
    }

    /// All exponents of total degree exactly `d`, in graded order.
    pub fn of_degree(n: usize, d: u32) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(n);
        fill_degree(n, d, &mut buf, &mut out);
        out
    }

    /// All exponents with `|α| ≤ d`, in graded order.
    pub fn up_to(n: usize, d: u32) -> Vec<Exponent> {
        (0..=d).flat_map(|k| Exponent::of_degree(n, k)).collect()
    }
}

fn fill_degree(n: usize, d: u32, buf: &mut Vec<u32>, out: &mut Vec<Exponent>) {
    if n == 0 {
        if d == 0 {
            out.push(Exponent(buf.clone()));
        }
        return;
    }
    if n == 1 {
        buf.push(d);
        out.push(Exponent(buf.clone()));
        buf.pop();
        return;
    }
    for k in (0..=d).rev() {
        buf.push(k);
        fill_degree(n - 1, d - k, buf, out);
        buf.pop();
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
