//! Certified membership in the class of operators `A` for which `e^{tA}` is
//! well defined on the polynomial ring.
//!
//! `e^{tA}` makes sense exactly when every polynomial lies in a
//! finite-dimensional `A`-invariant subspace, equivalently when the orbit
//! `p, Ap, A²p, …` has bounded degree. Only the positive side of this is
//! finitely checkable: [`check_in_g`] grows Krylov spans from monomial seeds
//! and returns an invariant filtration when they close up. Running out of
//! budget proves nothing.
//!
//! On a certified block the exponential is a matrix exponential, which
//! [`exp_on_subspace`] evaluates in floating point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::exponent::Exponent;
use crate::linalg::{expm, PolySpan, QMatrix};
use crate::operator::DiffOperator;
use crate::poly::{rational_to_f64, ApproxPolynomial, Degree, Polynomial};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Seeds are all monomials of degree at most this.
    pub seed_degree: u32,
    /// Give up once an iterate exceeds this degree.
    pub degree_budget: u32,
    /// Give up after this many applications of `A` to one seed.
    pub iteration_budget: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            seed_degree: 4,
            degree_budget: 12,
            iteration_budget: 64,
        }
    }
}

/// A finite basis with `A·span ⊆ span`, and the matrix of `A` restricted to it
/// (column `j` holds the coordinates of `A b_j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSubspace {
    basis: Vec<Polynomial>,
    matrix: QMatrix,
}

impl InvariantSubspace {
    /// Checks invariance and computes the restricted matrix.
    pub fn new(a: &DiffOperator, basis: Vec<Polynomial>) -> Result<Self> {
        let matrix = restrict_matrix(a, &basis)?;
        Ok(InvariantSubspace { basis, matrix })
    }

    /// Rebuilds a certificate from stored parts without trusting them; see
    /// [`InvariantSubspace::reverify`].
    pub fn from_parts(basis: Vec<Polynomial>, matrix: QMatrix) -> Self {
        InvariantSubspace { basis, matrix }
    }

    /// All monomials of degree at most `d`. Invariant for every
    /// degree-preserving operator.
    pub fn monomials_up_to(a: &DiffOperator, d: u32) -> Result<Self> {
        let basis = Exponent::up_to(a.dim(), d)
            .into_iter()
            .map(|e| Polynomial::monomial(e, Rational::from_integer(1.into())))
            .collect();
        InvariantSubspace::new(a, basis)
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Recomputes `A b_j` for every basis vector and compares with the stored
    /// matrix.
    pub fn reverify(&self, a: &DiffOperator) -> bool {
        restrict_matrix(a, &self.basis).is_ok_and(|m| m == self.matrix)
    }

    pub fn coordinates(&self, f: &Polynomial) -> Option<Vec<Rational>> {
        let mut span = PolySpan::new(f.dim());
        for b in &self.basis {
            span.try_push(b.clone());
        }
        if span.len() != self.basis.len() {
            return None;
        }
        span.coordinates(f)
    }

    /// Eigenvalues of the restricted matrix. Nonempty whenever the subspace is.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.basis.is_empty() {
            return Vec::new();
        }
        self.matrix
            .to_f64()
            .complex_eigenvalues()
            .iter()
            .copied()
            .collect()
    }
}

/// Matrix of `A|_V` in the given basis.
pub fn restrict_matrix(a: &DiffOperator, basis: &[Polynomial]) -> Result<QMatrix> {
    let n = a.dim();
    let mut span = PolySpan::new(n);
    for b in basis {
        check_dim(n, b.dim())?;
        if !span.try_push(b.clone()) {
            return Err(Error::DependentBasis);
        }
    }
    let k = basis.len();
    let mut m = QMatrix::zeros(k, k);
    for (j, b) in basis.iter().enumerate() {
        let image = a.apply(b)?;
        let coords = span
            .coordinates(&image)
            .ok_or(Error::NotInvariant { index: j })?;
        for (i, c) in coords.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitStep {
    pub iterate: usize,
    pub degree: Degree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExhaustedBudget {
    Degree,
    Iterations,
}

/// Degrees of `A^m x^α` for the seed that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTrace {
    pub seed: Exponent,
    pub steps: Vec<OrbitStep>,
    pub exhausted: ExhaustedBudget,
}

impl OrbitTrace {
    pub fn max_degree(&self) -> Degree {
        self.steps
            .iter()
            .map(|s| s.degree)
            .max()
            .unwrap_or(Degree::NegInfinity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipVerdict {
    /// `filtration[i]` is invariant and contains every polynomial of degree
    /// at most `i`; the spaces are nested.
    Member { filtration: Vec<InvariantSubspace> },
    /// Not a disproof.
    BudgetExceeded { trace: OrbitTrace },
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipVerdict::Member { .. })
    }
}

pub fn check_in_g(a: &DiffOperator, budgets: Budgets) -> Result<MembershipVerdict> {
    let Budgets {
        seed_degree,
        degree_budget,
        iteration_budget,
    } = budgets;
    if seed_degree > degree_budget || degree_budget > a.max_order() {
        return Err(Error::DegreeBudgetExceedsOperatorOrder {
            seed_degree,
            budget: degree_budget,
            max_order: a.max_order(),
        });
    }
    let n = a.dim();
    let mut span = PolySpan::new(n);
    let mut filtration = Vec::with_capacity(seed_degree as usize + 1);
    let one = Rational::from_integer(1.into());

    for d in 0..=seed_degree {
        for seed in Exponent::of_degree(n, d) {
            let mut v = Polynomial::monomial(seed.clone(), one.clone());
            if span.contains(&v) {
                continue;
            }
            let mut steps = vec![OrbitStep {
                iterate: 0,
                degree: v.degree(),
            }];
            span.try_push(v.clone());
            let mut iterate = 0;
            loop {
                iterate += 1;
                if iterate > iteration_budget {
                    return Ok(MembershipVerdict::BudgetExceeded {
                        trace: OrbitTrace {
                            seed,
                            steps,
                            exhausted: ExhaustedBudget::Iterations,
                        },
                    });
                }
                let w = a.apply(&v)?;
                steps.push(OrbitStep {
                    iterate,
                    degree: w.degree(),
                });
                if !w.degree().at_most(degree_budget) {
                    return Ok(MembershipVerdict::BudgetExceeded {
                        trace: OrbitTrace {
                            seed,
                            steps,
                            exhausted: ExhaustedBudget::Degree,
                        },
                    });
                }
                if !span.try_push(w.clone()) {
                    break;
                }
                v = w;
            }
        }
        filtration.push(InvariantSubspace::new(a, span.basis().to_vec())?);
    }
    Ok(MembershipVerdict::Member { filtration })
}

/// `e^{tA}` applied to `f`, computed on a certified block.
#[derive(Debug, Clone)]
pub struct BlockExponential {
    pub result: ApproxPolynomial,
    pub pade_degree: usize,
    pub squarings: u32,
}

fn coordinates_f64(cert: &InvariantSubspace, f: &Polynomial) -> Result<DVector<f64>> {
    let coords = cert.coordinates(f).ok_or(Error::NotInSubspace)?;
    Ok(DVector::from_iterator(
        coords.len(),
        coords.iter().map(rational_to_f64),
    ))
}

fn combine(cert: &InvariantSubspace, n: usize, c: &DVector<f64>) -> ApproxPolynomial {
    let mut out = ApproxPolynomial {
        n,
        terms: Default::default(),
    };
    for (b, &cj) in cert.basis.iter().zip(c.iter()) {
        for (alpha, coeff) in b.terms() {
            *out.terms.entry(alpha.clone()).or_insert(0.0) += cj * rational_to_f64(coeff);
        }
    }
    out
}

fn check_cert(a: &DiffOperator, cert: &InvariantSubspace) -> Result<()> {
    if cert.reverify(a) {
        Ok(())
    } else {
        Err(Error::NotInvariant { index: 0 })
    }
}

pub fn exp_on_subspace(
    a: &DiffOperator,
    cert: &InvariantSubspace,
    t: f64,
    f: &Polynomial,
) -> Result<BlockExponential> {
    check_dim(a.dim(), f.dim())?;
    check_cert(a, cert)?;
    let c = coordinates_f64(cert, f)?;
    let e = expm(&(cert.matrix.to_f64() * t));
    let mapped = &e.value * c;
    Ok(BlockExponential {
        result: combine(cert, a.dim(), &mapped),
        pade_degree: e.pade_degree,
        squarings: e.squarings,
    })
}

#[derive(Debug, Clone)]
pub struct LimitRow {
    pub k: u64,
    /// `(I + A/k)^k f`
    pub forward: ApproxPolynomial,
    pub forward_deviation: f64,
    /// `(I − A/k)^{−k} f`; `None` when `I − A/k` is singular.
    pub backward: Option<ApproxPolynomial>,
    pub backward_deviation: Option<f64>,
}

/// Deviations are maximum absolute monomial-coefficient differences from
/// `e^{A} f` as computed by [`exp_on_subspace`].
#[derive(Debug, Clone)]
pub struct LimitTable {
    pub reference: ApproxPolynomial,
    pub rows: Vec<LimitRow>,
}

impl LimitTable {
    pub fn forward_deviations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.forward_deviation).collect()
    }

    pub fn backward_deviations(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.backward_deviation).collect()
    }

    /// Strictly decreasing forward and backward deviations from row
    /// `from` on (skipped backward rows are ignored).
    pub fn decreasing_from(&self, from: usize) -> bool {
        let rows = &self.rows[from.min(self.rows.len())..];
        let fwd = rows
            .windows(2)
            .all(|w| w[1].forward_deviation < w[0].forward_deviation);
        let bwd: Vec<f64> = rows.iter().filter_map(|r| r.backward_deviation).collect();
        fwd && bwd.windows(2).all(|w| w[1] < w[0])
    }
}

fn matrix_power(m: &DMatrix<f64>, mut k: u64) -> DMatrix<f64> {
    let n = m.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

pub fn limit_formula_check(
    a: &DiffOperator,
    cert: &InvariantSubspace,
    f: &Polynomial,
    ks: &[u64],
) -> Result<LimitTable> {
    let reference = exp_on_subspace(a, cert, 1.0, f)?.result;
    let c = coordinates_f64(cert, f)?;
    let m = cert.matrix.to_f64();
    let dim = m.nrows();
    let ident = DMatrix::<f64>::identity(dim, dim);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let step = &m / k as f64;
        let fwd_mat = matrix_power(&(&ident + &step), k);
        let forward = combine(cert, a.dim(), &(fwd_mat * &c));
        let forward_deviation = forward.max_abs_diff(&reference);

        let resolvent = (&ident - &step)
            .try_inverse()
            .filter(|r| r.iter().all(|x| x.is_finite()));
        let backward = resolvent.map(|r| combine(cert, a.dim(), &(matrix_power(&r, k) * &c)));
        let backward_deviation = backward.as_ref().map(|b| b.max_abs_diff(&reference));
        rows.push(LimitRow {
            k,
            forward,
            forward_deviation,
            backward,
            backward_deviation,
        });
    }
    Ok(LimitTable { reference, rows })
}
