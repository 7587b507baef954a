//! Truncated moment tests for `K`-positivity preservation.
//!
//! `T = Σ q_α ∂^α` maps `Pos(K)` into itself iff for every `y ∈ K` the
//! sequence `s_α = α!·q_α(y)` is the moment sequence of a measure on `K − y`.
//! That condition is not finitely checkable, but its truncations are: the
//! moment matrix `M_d = [s_{β+γ}]` must be positive semidefinite, and so must
//! the localizing matrices of the half-line and interval constraints.
//!
//! When one of these matrices has an eigenvalue below `−tol` with eigenvector
//! `p`, then `f(x) = g(x)·p(x−y)²` is nonnegative on `K` (with `g` the
//! constraint factor, or `1`), and `(Tf)(y) = pᵀMp < 0`. [`preserver_test`]
//! builds that witness in exact arithmetic and re-checks the sign before
//! returning it. Passing every tested matrix proves nothing about `T`.

use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::exponent::Exponent;
use crate::linalg::{min_eigenpair, rationalize, QMatrix};
use crate::operator::DiffOperator;
use crate::poly::{f64_to_rational, rational_to_f64, Polynomial};
use crate::Rational;

pub const DEFAULT_TOL: f64 = 1e-9;

/// The closed set `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KSpec {
    FullSpace,
    /// `[0, ∞)`, one variable.
    HalfLine,
    /// `[a, b]` with `a < b`, one variable.
    Interval {
        a: Rational,
        b: Rational,
    },
}

impl KSpec {
    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        if a < b {
            Ok(KSpec::Interval { a, b })
        } else {
            Err(Error::InvalidK(format!(
                "interval needs a < b, got [{a}, {b}]"
            )))
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            KSpec::FullSpace => Ok(()),
            _ => check_dim(1, n),
        }
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        match self {
            KSpec::FullSpace => true,
            KSpec::HalfLine => y.len() == 1 && !y[0].is_negative(),
            KSpec::Interval { a, b } => y.len() == 1 && &y[0] >= a && &y[0] <= b,
        }
    }

    pub fn contains_f64(&self, y: &[f64]) -> bool {
        use crate::poly::rational_to_f64;
        match self {
            KSpec::FullSpace => true,
            KSpec::HalfLine => y.len() == 1 && y[0] >= 0.0,
            KSpec::Interval { a, b } => {
                y.len() == 1 && y[0] >= rational_to_f64(a) && y[0] <= rational_to_f64(b)
            }
        }
    }

    /// `{−2,…,2}ⁿ` for the full space; nine equispaced points otherwise
    /// (`0, 1/2, …, 4` on the half-line).
    pub fn default_grid(&self, n: usize) -> Vec<Vec<Rational>> {
        let int = |k: i64| Rational::from_integer(k.into());
        match self {
            KSpec::FullSpace => {
                let mut grid = vec![Vec::with_capacity(n)];
                for _ in 0..n {
                    grid = grid
                        .into_iter()
                        .flat_map(|p| {
                            (-2..=2).map(move |k| {
                                let mut q = p.clone();
                                q.push(int(k));
                                q
                            })
                        })
                        .collect();
                }
                grid
            }
            KSpec::HalfLine => (0..9)
                .map(|k| vec![Rational::new(k.into(), 2.into())])
                .collect(),
            KSpec::Interval { a, b } => (0..9)
                .map(|k| vec![a + (b - a) * Rational::new(k.into(), 8.into())])
                .collect(),
        }
    }

    /// `K − y`.
    pub fn shifted(&self, y: &[Rational]) -> Support {
        match self {
            KSpec::FullSpace => Support::Full,
            KSpec::HalfLine => Support::From(-y[0].clone()),
            KSpec::Interval { a, b } => Support::Between(a - &y[0], b - &y[0]),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            KSpec::FullSpace => Support::Full,
            KSpec::HalfLine => Support::From(Rational::zero()),
            KSpec::Interval { a, b } => Support::Between(a.clone(), b.clone()),
        }
    }

    /// Factors `g` with `g ≥ 0` on `K` that witnesses may carry.
    fn allowed_factors(&self) -> Vec<Polynomial> {
        let x = Polynomial::var(1, 0);
        match self {
            KSpec::FullSpace => Vec::new(),
            KSpec::HalfLine => vec![x],
            KSpec::Interval { a, b } => vec![
                &x - &Polynomial::constant(1, a.clone()),
                &Polynomial::constant(1, b.clone()) - &x,
            ],
        }
    }
}

impl fmt::Display for KSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSpec::FullSpace => write!(f, "R"),
            KSpec::HalfLine => write!(f, "halfline"),
            KSpec::Interval { a, b } => write!(f, "interval:{a},{b}"),
        }
    }
}

impl std::str::FromStr for KSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "Rn" | "full" => Ok(KSpec::FullSpace),
            "halfline" => Ok(KSpec::HalfLine),
            _ => {
                let rest = s
                    .strip_prefix("interval:")
                    .ok_or_else(|| Error::InvalidK(format!("unknown K {s:?}")))?;
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidK(format!("expected interval:a,b, got {s:?}")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<Rational>()
                        .map_err(|_| Error::InvalidK(format!("bad endpoint {v:?}")))
                };
                KSpec::interval(parse(a)?, parse(b)?)
            }
        }
    }
}

/// A support set in recentred coordinates `u = x − y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Full,
    /// `[a, ∞)`
    From(Rational),
    /// `[a, b]`
    Between(Rational, Rational),
}

impl Support {
    fn localizers(&self) -> Vec<Localizer> {
        match self {
            Support::Full => Vec::new(),
            Support::From(a) => vec![Localizer::LowerBound(a.clone())],
            Support::Between(a, b) => vec![
                Localizer::LowerBound(a.clone()),
                Localizer::UpperBound(b.clone()),
            ],
        }
    }
}

/// Linear constraint `g(u) ≥ 0` of a one-dimensional support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Localizer {
    /// `u − a`
    LowerBound(Rational),
    /// `b − u`
    UpperBound(Rational),
}

impl Localizer {
    fn factor(&self) -> Polynomial {
        let u = Polynomial::var(1, 0);
        match self {
            Localizer::LowerBound(a) => &u - &Polynomial::constant(1, a.clone()),
            Localizer::UpperBound(b) => &Polynomial::constant(1, b.clone()) - &u,
        }
    }
}

/// Dense values `s_α` for `|α| ≤ order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedMomentSequence {
    n: usize,
    order: u32,
    values: std::collections::BTreeMap<Exponent, Rational>,
}

impl TruncatedMomentSequence {
    /// Missing entries are zero.
    pub fn new<I>(n: usize, order: u32, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut map: std::collections::BTreeMap<_, _> = Exponent::up_to(n, order)
            .into_iter()
            .map(|a| (a, Rational::zero()))
            .collect();
        for (a, v) in values {
            check_dim(n, a.dim())?;
            if a.degree() > order {
                return Err(Error::DegreeBudgetExceeded {
                    degree: a.degree(),
                    max_order: order,
                });
            }
            map.insert(a, v);
        }
        Ok(TruncatedMomentSequence {
            n,
            order,
            values: map,
        })
    }

    /// One variable: `s_k = values[k]`.
    pub fn univariate(values: &[Rational]) -> Self {
        let order = values.len().saturating_sub(1) as u32;
        TruncatedMomentSequence::new(
            1,
            order,
            values
                .iter()
                .enumerate()
                .map(|(k, v)| (Exponent::new(vec![k as u32]), v.clone())),
        )
        .expect("univariate sequence is well formed")
    }

    /// `s_α = α!·q_α(y)` for `|α| ≤ order`.
    pub fn from_operator_at(t: &DiffOperator, y: &[Rational], order: u32) -> Result<Self> {
        check_dim(t.dim(), y.len())?;
        if order > t.max_order() {
            return Err(Error::DegreeBudget {
                needed: order,
                max_order: t.max_order(),
            });
        }
        let mut values = Vec::new();
        for (alpha, q) in t.entries() {
            if alpha.degree() <= order {
                values.push((
                    alpha.clone(),
                    Rational::from_integer(alpha.factorial()) * q.evaluate(y)?,
                ));
            }
        }
        TruncatedMomentSequence::new(t.dim(), order, values)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
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

    /// Riesz functional `L(p) = Σ p_α s_α`.
    pub fn riesz(&self, p: &Polynomial) -> Rational {
        p.terms().map(|(a, c)| c * self.get(a)).sum()
    }
}

/// Symmetric matrix indexed by monomials in graded order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentMatrix {
    pub basis: Vec<Exponent>,
    pub entries: QMatrix,
}

/// `M_d[β, γ] = s_{β+γ}` for `|β|, |γ| ≤ d`.
pub fn moment_matrix(s: &TruncatedMomentSequence, d: u32) -> Result<MomentMatrix> {
    localized(s, d, &Polynomial::one(s.dim()), 0)
}

/// `[L(g·u^{β+γ})]` for `|β|, |γ| ≤ d − 1` and linear `g`.
pub fn localizing_matrix(
    s: &TruncatedMomentSequence,
    d: u32,
    localizer: &Localizer,
) -> Result<MomentMatrix> {
    check_dim(1, s.dim())?;
    if d == 0 {
        return Ok(MomentMatrix {
            basis: Vec::new(),
            entries: QMatrix::zeros(0, 0),
        });
    }
    localized(s, d - 1, &localizer.factor(), 1)
}

fn localized(
    s: &TruncatedMomentSequence,
    d: u32,
    g: &Polynomial,
    g_degree: u32,
) -> Result<MomentMatrix> {
    if 2 * d + g_degree > s.order() {
        return Err(Error::DegreeBudget {
            needed: 2 * d + g_degree,
            max_order: s.order(),
        });
    }
    let basis = Exponent::up_to(s.dim(), d);
    let k = basis.len();
    let mut entries = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let shift = basis[i].add(&basis[j]);
            let v: Rational = g.terms().map(|(a, c)| c * s.get(&a.add(&shift))).sum();
            entries.set(i, j, v.clone());
            entries.set(j, i, v);
        }
    }
    Ok(MomentMatrix { basis, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailingMatrix {
    Moment,
    Localizing(Localizer),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionOutcome {
    /// `borderline` is set when the smallest eigenvalue lies in `[−tol, 0)`.
    Pass {
        min_eigenvalue: f64,
        borderline: bool,
    },
    /// `vector` is the unit eigenvector for `eigenvalue`, over `basis`.
    Fail {
        matrix: FailingMatrix,
        eigenvalue: f64,
        vector: Vec<f64>,
        basis: Vec<Exponent>,
    },
}

impl ConditionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ConditionOutcome::Pass { .. })
    }
}

/// PSD checks of `M_d` and of the localizing matrices of `support`, in that
/// order; the first failing matrix is reported.
pub fn necessary_condition(
    s: &TruncatedMomentSequence,
    support: &Support,
    d: u32,
    tol: f64,
) -> Result<ConditionOutcome> {
    if !matches!(support, Support::Full) {
        check_dim(1, s.dim())?;
    }
    let mut checks = vec![(FailingMatrix::Moment, moment_matrix(s, d)?)];
    for loc in support.localizers() {
        let m = localizing_matrix(s, d, &loc)?;
        checks.push((FailingMatrix::Localizing(loc), m));
    }
    let mut min_eig = f64::INFINITY;
    for (kind, m) in checks {
        if m.basis.is_empty() {
            continue;
        }
        let (val, vec) = min_eigenpair(&m.entries.to_f64());
        if val < -tol {
            return Ok(ConditionOutcome::Fail {
                matrix: kind,
                eigenvalue: val,
                vector: vec.iter().copied().collect(),
                basis: m.basis,
            });
        }
        min_eig = min_eig.min(val);
    }
    Ok(ConditionOutcome::Pass {
        min_eigenvalue: min_eig,
        borderline: min_eig < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// `f = p(x−y)²`
    Square,
    /// `f = g(x)·p(x−y)²` with `g` a constraint factor of `K`.
    LocalizedSquare,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Square => write!(f, "square"),
            Construction::LocalizedSquare => write!(f, "localized-square"),
        }
    }
}

/// A point `y ∈ K` and `f ≥ 0` on `K` with `(Tf)(y) < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationCertificate {
    pub k: KSpec,
    pub y: Vec<Rational>,
    pub witness: Polynomial,
    /// `p(x − y)`
    pub root: Polynomial,
    /// `g(x)`, the constant `1` for plain squares.
    pub factor: Polynomial,
    pub value: Rational,
    pub construction: Construction,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WarningKind {
    /// Smallest eigenvalue in `[−tol, 0)`.
    Borderline { min_eigenvalue: f64 },
    /// Float test failed but no rational witness reproduced the sign.
    UnconfirmedWitness { eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub y: Vec<Rational>,
    pub kind: WarningKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreserverOutcome {
    /// The truncated conditions held at every tested point. Not a proof.
    NoViolationFound {
        warnings: Vec<Warning>,
    },
    Violation(Box<ViolationCertificate>),
}

impl PreserverOutcome {
    pub fn violation(&self) -> Option<&ViolationCertificate> {
        match self {
            PreserverOutcome::Violation(c) => Some(c),
            PreserverOutcome::NoViolationFound { .. } => None,
        }
    }
}

enum PointResult {
    Clean,
    Warn(Warning),
    Violation(Box<ViolationCertificate>),
}

pub fn preserver_test(
    t: &DiffOperator,
    k: &KSpec,
    grid: &[Vec<Rational>],
    d: u32,
    tol: f64,
) -> Result<PreserverOutcome> {
    preserver_test_approx(t, k, grid, d, tol, 0.0)
}

/// [`preserver_test`] for an operator whose coefficients carry relative error
/// up to `rel_err` (e.g. from a float matrix exponential). A witness must then
/// beat `rel_err·Σ|s_α·g_α|` as well as `tol`, where `g` is the witness
/// expanded around `y`; smaller values are reported as unconfirmed.
pub fn preserver_test_approx(
    t: &DiffOperator,
    k: &KSpec,
    grid: &[Vec<Rational>],
    d: u32,
    tol: f64,
    rel_err: f64,
) -> Result<PreserverOutcome> {
    k.check_dim(t.dim())?;
    if 2 * d > t.max_order() {
        return Err(Error::DegreeBudget {
            needed: 2 * d,
            max_order: t.max_order(),
        });
    }
    for y in grid {
        check_dim(t.dim(), y.len())?;
        if !k.contains(y) {
            return Err(Error::GridPointOutsideK {
                point: y.iter().map(|v| v.to_string()).collect(),
            });
        }
    }
    let results: Vec<Result<PointResult>> = grid
        .par_iter()
        .map(|y| test_point(t, k, y, d, tol, rel_err))
        .collect();
    let mut warnings = Vec::new();
    for r in results {
        match r? {
            PointResult::Clean => {}
            PointResult::Warn(w) => warnings.push(w),
            PointResult::Violation(c) => return Ok(PreserverOutcome::Violation(c)),
        }
    }
    Ok(PreserverOutcome::NoViolationFound { warnings })
}

fn test_point(
    t: &DiffOperator,
    k: &KSpec,
    y: &[Rational],
    d: u32,
    tol: f64,
    rel_err: f64,
) -> Result<PointResult> {
    let s = TruncatedMomentSequence::from_operator_at(t, y, 2 * d)?;
    match necessary_condition(&s, &k.shifted(y), d, tol)? {
        ConditionOutcome::Pass {
            min_eigenvalue,
            borderline,
        } => Ok(if borderline {
            PointResult::Warn(Warning {
                y: y.to_vec(),
                kind: WarningKind::Borderline { min_eigenvalue },
            })
        } else {
            PointResult::Clean
        }),
        ConditionOutcome::Fail {
            matrix,
            eigenvalue,
            vector,
            basis,
        } => Ok(
            match build_witness(
                t,
                k,
                y,
                &s,
                &matrix,
                &vector,
                &basis,
                eigenvalue,
                (tol, rel_err),
            )? {
                Some(cert) => PointResult::Violation(Box::new(cert)),
                None => PointResult::Warn(Warning {
                    y: y.to_vec(),
                    kind: WarningKind::UnconfirmedWitness { eigenvalue },
                }),
            },
        ),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_witness(
    t: &DiffOperator,
    k: &KSpec,
    y: &[Rational],
    s: &TruncatedMomentSequence,
    matrix: &FailingMatrix,
    vector: &[f64],
    basis: &[Exponent],
    eigenvalue: f64,
    (tol, rel_err): (f64, f64),
) -> Result<Option<ViolationCertificate>> {
    let n = t.dim();
    let (factor, construction) = match matrix {
        FailingMatrix::Moment => (Polynomial::one(n), Construction::Square),
        // Constraint factor back in x-coordinates: u − a' = x − (a' + y).
        FailingMatrix::Localizing(Localizer::LowerBound(a)) => (
            &Polynomial::var(1, 0) - &Polynomial::constant(1, a + &y[0]),
            Construction::LocalizedSquare,
        ),
        FailingMatrix::Localizing(Localizer::UpperBound(b)) => (
            &Polynomial::constant(1, b + &y[0]) - &Polynomial::var(1, 0),
            Construction::LocalizedSquare,
        ),
    };
    let minus_y: Vec<Rational> = y.iter().map(|v| -v.clone()).collect();
    let tol_q = f64_to_rational(tol);
    // Coarse rationals first: they give readable witnesses when the
    // eigenvector is simple, finer ones when the margin is thin.
    let peak = vector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(None);
    }
    for max_den in [1_000u64, 1_000_000, 1_000_000_000, 0] {
        let coeffs = vector.iter().map(|&v| {
            let v = v / peak;
            if max_den == 0 {
                f64_to_rational(v)
            } else {
                rationalize(v, max_den)
            }
        });
        let p = Polynomial::from_terms(n, basis.iter().cloned().zip(coeffs))?;
        if p.is_zero() {
            continue;
        }
        let root = p.taylor_shift(&minus_y)?;
        let witness = &factor * &(&root * &root);
        let value = t.apply(&witness)?.evaluate(y)?;
        let noise = if rel_err > 0.0 {
            // (Tf)(y) = Σ s_α g_α with g = f(y + u)
            let g = witness.taylor_shift(y)?;
            let mass: f64 = g
                .terms()
                .map(|(a, c)| (rational_to_f64(&s.get(a)) * rational_to_f64(c)).abs())
                .sum();
            f64_to_rational(rel_err * mass)
        } else {
            Rational::zero()
        };
        if value < -(&tol_q).max(&noise).clone() {
            return Ok(Some(ViolationCertificate {
                k: k.clone(),
                y: y.to_vec(),
                witness,
                root,
                factor,
                value,
                construction,
                eigenvalue,
            }));
        }
    }
    Ok(None)
}

/// Independent re-check of a certificate: the witness must be a structurally
/// nonnegative product on `K`, `y` must lie in `K`, and `(Tf)(y)` recomputed
/// exactly must be negative and equal to the recorded value.
pub fn verify_certificate(t: &DiffOperator, cert: &ViolationCertificate, k: &KSpec) -> bool {
    let n = t.dim();
    if cert.y.len() != n || !k.contains(&cert.y) || k.check_dim(n).is_err() {
        return false;
    }
    if cert.witness.dim() != n || cert.root.dim() != n || cert.factor.dim() != n {
        return false;
    }
    let factor_ok = match cert.construction {
        Construction::Square => cert.factor == Polynomial::one(n),
        Construction::LocalizedSquare => k.allowed_factors().contains(&cert.factor),
    };
    if !factor_ok || cert.witness != &cert.factor * &(&cert.root * &cert.root) {
        return false;
    }
    match t.apply(&cert.witness).and_then(|g| g.evaluate(&cert.y)) {
        Ok(v) => v.is_negative() && v == cert.value,
        Err(_) => false,
    }
}

/// Samples `count` points of `K` (deterministic, spread over `[-R, R]ⁿ` or
/// the interval) and returns the smallest witness value found.
pub fn sample_min(witness: &Polynomial, k: &KSpec, count: usize) -> f64 {
    let n = witness.dim();
    let (lo, hi) = match k {
        KSpec::FullSpace => (-10.0, 10.0),
        KSpec::HalfLine => (0.0, 20.0),
        KSpec::Interval { a, b } => (
            crate::poly::rational_to_f64(a),
            crate::poly::rational_to_f64(b),
        ),
    };
    // Halton-style low-discrepancy points, one prime base per coordinate.
    const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let radical_inverse = |mut i: u32, base: u32| {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    (0..count as u32)
        .map(|i| {
            let pt: Vec<f64> = (0..n)
                .map(|j| lo + (hi - lo) * radical_inverse(i + 1, PRIMES[j % PRIMES.len()]))
                .collect();
            witness.evaluate_f64(&pt).unwrap_or(f64::NAN)
        })
        .fold(f64::INFINITY, f64::min)
}
