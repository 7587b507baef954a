//! Linear algebra kernels: exact rational spans and matrices, plus the float
//! routines (symmetric eigendecomposition, matrix exponential) used by the
//! numerical parts of the crate.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::exponent::Exponent;
use crate::poly::{rational_to_f64, Polynomial};
use crate::Rational;

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rational_to_f64(self.get(i, j)))
    }

    /// Characteristic polynomial `det(λI − M)` by Faddeev–LeVerrier,
    /// coefficients from `λ⁰` up to the monic `λⁿ`.
    pub fn characteristic_polynomial(&self) -> Vec<Rational> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = QMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                let v = next.get(i, i) + &coeffs[n - k + 1];
                next.set(i, i, v);
            }
            let am = self.mul(&next);
            let trace: Rational = (0..n).map(|i| am.get(i, i).clone()).sum();
            coeffs[n - k] = -trace / Rational::from_integer((k as i64).into());
            m = next;
        }
        coeffs
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }
}

/// A finite list of polynomials together with a reduced echelon form of their
/// span, so membership and coordinates are exact.
#[derive(Debug, Clone)]
pub struct PolySpan {
    n: usize,
    basis: Vec<Polynomial>,
    // Echelon rows keyed by pivot exponent: (reduced vector, combination of basis indices).
    rows: BTreeMap<Exponent, (Polynomial, Vec<Rational>)>,
}

impl PolySpan {
    pub fn new(n: usize) -> Self {
        PolySpan {
            n,
            basis: Vec::new(),
            rows: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Reduces `p` against the echelon rows. Returns the remainder and the
    /// combination (over basis indices) that was subtracted.
    fn reduce(&self, p: &Polynomial) -> (Polynomial, Vec<Rational>) {
        let mut rem = p.clone();
        let mut combo = vec![Rational::zero(); self.basis.len()];
        for (pivot, (row, row_combo)) in self.rows.iter().rev() {
            let c = rem.coeff(pivot);
            if c.is_zero() {
                continue;
            }
            rem = &rem - &row.scale(&c);
            for (acc, r) in combo.iter_mut().zip(row_combo) {
                *acc += &c * r;
            }
        }
        (rem, combo)
    }

    /// Appends `p` if it is independent of the current span.
    pub fn try_push(&mut self, p: Polynomial) -> bool {
        let (rem, combo) = self.reduce(&p);
        if rem.is_zero() {
            return false;
        }
        let (pivot, lead) = rem
            .terms()
            .next_back()
            .map(|(a, c)| (a.clone(), c.clone()))
            .expect("nonzero remainder");
        let inv = Rational::one() / lead;
        let idx = self.basis.len();
        self.basis.push(p);
        for row in self.rows.values_mut() {
            row.1.push(Rational::zero());
        }
        // rem = p − Σ combo·b, so row = (p − Σ combo·b)/lead.
        let mut row_combo: Vec<Rational> = combo.iter().map(|c| -c * &inv).collect();
        row_combo.push(inv.clone());
        let row = rem.scale(&inv);
        // Keep the echelon form fully reduced.
        for (other, other_combo) in self.rows.values_mut() {
            let c = other.coeff(&pivot);
            if !c.is_zero() {
                *other = &*other - &row.scale(&c);
                for (acc, r) in other_combo.iter_mut().zip(&row_combo) {
                    *acc -= &c * r;
                }
            }
        }
        self.rows.insert(pivot, (row, row_combo));
        debug_assert_eq!(idx + 1, self.basis.len());
        true
    }

    /// Coordinates of `p` with respect to [`PolySpan::basis`], if `p` lies in the span.
    pub fn coordinates(&self, p: &Polynomial) -> Option<Vec<Rational>> {
        if p.dim() != self.n {
            return None;
        }
        let (rem, combo) = self.reduce(p);
        rem.is_zero().then_some(combo)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.coordinates(p).is_some()
    }
}

/// Smallest eigenvalue of a symmetric matrix and its unit eigenvector.
pub fn min_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    if m.nrows() == 0 {
        return (f64::INFINITY, DVector::zeros(0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let mut v = eig.eigenvectors.column(idx).into_owned();
    let norm = v.norm();
    if norm > 0.0 {
        v /= norm;
    }
    // Sign convention: largest-magnitude component positive.
    let (_, &lead) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty");
    if lead < 0.0 {
        v = -v;
    }
    (val, v)
}

/// Result of [`expm`]: the exponential and the parameters that produced it.
#[derive(Debug, Clone)]
pub struct Expm {
    pub value: DMatrix<f64>,
    pub pade_degree: usize,
    pub squarings: u32,
}

// θ_m for m = 3, 5, 7, 9, 13: the 1-norm bounds under which the [m/m] Padé
// approximant meets unit roundoff in double precision.
const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

fn pade_coefficients(m: usize) -> Vec<f64> {
    // b_j = (2m − j)! m! / ((2m)! j! (m − j)!)
    let mut b = vec![1.0; m + 1];
    for j in 1..=m {
        b[j] = b[j - 1] * (m + 1 - j) as f64 / ((j * (2 * m + 1 - j)) as f64);
    }
    b
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (degree chosen from the 1-norm).
pub fn expm(a: &DMatrix<f64>) -> Expm {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let ident = DMatrix::<f64>::identity(n, n);
    if n == 0 {
        return Expm {
            value: ident,
            pade_degree: 0,
            squarings: 0,
        };
    }
    let norm = one_norm(a);
    let (m, s) = match PADE_THETA.iter().find(|(_, theta)| norm <= *theta) {
        Some(&(m, _)) => (m, 0u32),
        None => {
            let theta13 = PADE_THETA[4].1;
            let s = (norm / theta13).log2().ceil().max(0.0) as u32;
            (13, s)
        }
    };
    let scaled = a / 2f64.powi(s as i32);
    let b = pade_coefficients(m);

    // Split the Padé numerator into even (V) and odd (U) parts.
    let a2 = &scaled * &scaled;
    let mut powers = vec![ident.clone(), a2.clone()];
    for _ in 2..=(m / 2) {
        let next = powers.last().expect("nonempty") * &a2;
        powers.push(next);
    }
    let mut u_inner = DMatrix::<f64>::zeros(n, n);
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 <= m {
            u_inner += p * b[2 * k + 1];
        }
        v += p * b[2 * k];
    }
    let u = &scaled * u_inner;
    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is nonsingular within θ_m");
    for _ in 0..s {
        r = &r * &r;
    }
    Expm {
        value: r,
        pade_degree: m,
        squarings: s,
    }
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    use num_bigint::BigInt;
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol * (1.0 + b.abs())
        }
    }

    #[test]
    fn pade_coefficients_match_table() {
        let b13 = pade_coefficients(13);
        // Ratios against the tabulated integer coefficients.
        let table = [
            64764752532480000.0f64,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        for j in 0..=13 {
            assert!(close(b13[j] * table[0], table[j], 1e-12), "j={j}");
        }
        let b3 = pade_coefficients(3);
        assert!(close(b3[1] * 120.0, 60.0, 1e-15));
        assert!(close(b3[3] * 120.0, 1.0, 1e-15));
    }

    /// Oracle: Taylor series summed until terms vanish.
    fn taylor_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..200 {
            term = &term * a / k as f64;
            sum += &term;
            if term.abs().max() < 1e-300 {
                break;
            }
        }
        sum
    }

    #[test]
    fn expm_against_series_and_nalgebra() {
        let cases = [
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.1, 0.2, 0.0, -0.3, 0.05, 0.4, 0.0, 0.1, -0.2]),
            DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 3.0, 0.0, 0.25, 0.0, -2.0]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, 2.0, 3.0, 4.0])),
        ];
        for a in &cases {
            let got = expm(a);
            let series = taylor_expm(a);
            let reference = a.clone().exp();
            for (x, y) in got.value.iter().zip(series.iter()) {
                assert!(close(*x, *y, 1e-12), "{x} vs {y}");
            }
            for (x, y) in got.value.iter().zip(reference.iter()) {
                assert!(close(*x, *y, 1e-12), "{x} vs {y}");
            }
        }
        let big = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 10.0]));
        let r = expm(&big);
        assert!(r.squarings > 0);
        assert!(close(r.value[(1, 1)], 10f64.exp(), 1e-13));
    }

    #[test]
    fn span_coordinates() {
        let x = Polynomial::var(1, 0);
        let mut span = PolySpan::new(1);
        assert!(span.try_push(x.pow(2)));
        assert!(span.try_push(&x.pow(2) + &x));
        assert!(!span.try_push(x.scale(&int(3))));
        assert!(span.try_push(Polynomial::one(1)));
        let target = &(&x.pow(2).scale(&int(5)) + &x) - &Polynomial::one(1);
        let c = span.coordinates(&target).unwrap();
        let rebuilt = span
            .basis()
            .iter()
            .zip(&c)
            .fold(Polynomial::zero(1), |acc, (b, k)| &acc + &b.scale(k));
        assert_eq!(rebuilt, target);
        assert!(span.coordinates(&x.pow(3)).is_none());
    }

    #[test]
    fn charpoly() {
        let m = QMatrix::from_rows(vec![vec![int(2), int(1)], vec![int(0), int(3)]]);
        // (λ−2)(λ−3) = λ² − 5λ + 6
        assert_eq!(m.characteristic_polynomial(), vec![int(6), int(-5), int(1)]);
        let z = QMatrix::zeros(3, 3);
        assert_eq!(
            z.characteristic_polynomial(),
            vec![int(0), int(0), int(0), int(1)]
        );
    }

    #[test]
    fn min_eigen_diag() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        let (val, v) = min_eigenpair(&m);
        assert!(close(val, -2.0, 1e-14));
        assert!(close(v[0], 0.0, 1e-14) && close(v[1], 1.0, 1e-14));
    }

    #[test]
    fn rationalize_simple() {
        assert_eq!(rationalize(0.5, 1000), Rational::new(1.into(), 2.into()));
        assert_eq!(
            rationalize(-1.0 / 3.0, 1000),
            Rational::new((-1).into(), 3.into())
        );
        assert_eq!(rationalize(0.0, 1000), int(0));
        let r = rationalize(std::f64::consts::FRAC_1_SQRT_2, 1_000_000);
        assert!((rational_to_f64(&r) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-11);
    }
}
