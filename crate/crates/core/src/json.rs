//! JSON file formats.
//!
//! Exact values are rational strings (`"3/2"`, `"-4"`); decimals are
//! rejected. Floats only appear in output objects marked `"approx": true`.
//!
//! ```text
//! polynomial  {"n":2, "terms":[{"alpha":[1,0], "coeff":"3/2"}]}
//! operator    {"n":1, "D":4, "table":[{"alpha":[2], "q":<polynomial>}]}
//! constant    {"n":1, "D":4, "table":[{"alpha":[1], "a":"1"}]}
//! diagonal    {"n":1, "D":4, "kind":"t"|"c", "values":[{"alpha":[0], "v":"1"}]}
//! triplet     {"n":1, "Sigma":[["2"]], "b":["0"], "nu":[{"z":["1"], "w":"1"}]}
//! grid        [["0"], ["1/2"]]
//! ```

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constgroup::ConstOperator;
use crate::diagonal::{DiagonalSequence, SequenceKind};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::levy::LevyTriplet;
use crate::linalg::QMatrix;
use crate::membership::InvariantSubspace;
use crate::moment::{Construction, KSpec, ViolationCertificate};
use crate::operator::DiffOperator;
use crate::poly::{ApproxPolynomial, Polynomial};
use crate::Rational;

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!("{s:?} is not an exact rational")));
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den: num_bigint::BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if num_traits::Zero::is_zero(&den) {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

fn parse_all(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("wire types serialize")
}

fn check_alpha(alpha: &[u32], n: usize) -> Result<Exponent> {
    if alpha.len() != n {
        return Err(Error::Parse(format!(
            "exponent {alpha:?} has {} entries, expected {n}",
            alpha.len()
        )));
    }
    Ok(Exponent::new(alpha.to_vec()))
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    alpha: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    n: usize,
    terms: Vec<TermWire>,
}

impl PolyWire {
    fn from_poly(p: &Polynomial) -> Self {
        PolyWire {
            n: p.dim(),
            terms: p
                .terms()
                .map(|(a, c)| TermWire {
                    alpha: a.entries().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    fn into_poly(self) -> Result<Polynomial> {
        let n = self.n;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((check_alpha(&t.alpha, n)?, parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        Polynomial::from_terms(n, terms)
    }
}

pub fn polynomial_to_json(p: &Polynomial) -> Value {
    to_value(&PolyWire::from_poly(p))
}

pub fn polynomial_from_json(v: &Value) -> Result<Polynomial> {
    from_value::<PolyWire>(v, "polynomial")?.into_poly()
}

pub fn approx_polynomial_to_json(p: &ApproxPolynomial) -> Value {
    let terms: Vec<Value> = p
        .terms
        .iter()
        .filter(|(_, c)| **c != 0.0)
        .map(|(a, c)| json!({"alpha": a.entries(), "coeff": c}))
        .collect();
    json!({"n": p.n, "approx": true, "terms": terms})
}

#[derive(Serialize, Deserialize)]
struct DiffEntryWire {
    alpha: Vec<u32>,
    q: PolyWire,
}

#[derive(Serialize, Deserialize)]
struct DiffWire {
    n: usize,
    #[serde(rename = "D")]
    d: u32,
    table: Vec<DiffEntryWire>,
}

pub fn operator_to_json(t: &DiffOperator) -> Value {
    to_value(&DiffWire {
        n: t.dim(),
        d: t.max_order(),
        table: t
            .entries()
            .map(|(a, q)| DiffEntryWire {
                alpha: a.entries().to_vec(),
                q: PolyWire::from_poly(q),
            })
            .collect(),
    })
}

pub fn operator_from_json(v: &Value) -> Result<DiffOperator> {
    let w: DiffWire = from_value(v, "operator")?;
    let n = w.n;
    let entries = w
        .table
        .into_iter()
        .map(|e| Ok((check_alpha(&e.alpha, n)?, e.q.into_poly()?)))
        .collect::<Result<Vec<_>>>()?;
    DiffOperator::from_table(n, w.d, entries)
}

#[derive(Serialize, Deserialize)]
struct ConstEntryWire {
    alpha: Vec<u32>,
    a: String,
}

#[derive(Serialize, Deserialize)]
struct ConstWire {
    n: usize,
    #[serde(rename = "D")]
    d: u32,
    table: Vec<ConstEntryWire>,
}

pub fn const_operator_to_json(a: &ConstOperator) -> Value {
    to_value(&ConstWire {
        n: a.dim(),
        d: a.max_order(),
        table: a
            .entries()
            .map(|(alpha, c)| ConstEntryWire {
                alpha: alpha.entries().to_vec(),
                a: c.to_string(),
            })
            .collect(),
    })
}

pub fn const_operator_from_json(v: &Value) -> Result<ConstOperator> {
    let w: ConstWire = from_value(v, "constant-coefficient operator")?;
    let n = w.n;
    let entries = w
        .table
        .iter()
        .map(|e| Ok((check_alpha(&e.alpha, n)?, parse_rational(&e.a)?)))
        .collect::<Result<Vec<_>>>()?;
    ConstOperator::from_table(n, w.d, entries)
}

/// Accepts either an operator with constant `q` polynomials or the
/// constant-coefficient format.
pub fn any_const_operator_from_json(v: &Value) -> Result<ConstOperator> {
    if let Ok(a) = const_operator_from_json(v) {
        return Ok(a);
    }
    let t = operator_from_json(v)?;
    let entries = t
        .entries()
        .map(|(a, q)| match q.degree() {
            crate::poly::Degree::Finite(d) if d > 0 => Err(Error::Parse(format!(
                "coefficient of ∂^{a} is not constant"
            ))),
            _ => Ok((a.clone(), q.coeff(&Exponent::zero(t.dim())))),
        })
        .collect::<Result<Vec<_>>>()?;
    ConstOperator::from_table(t.dim(), t.max_order(), entries)
}

#[derive(Serialize, Deserialize)]
struct DiagEntryWire {
    alpha: Vec<u32>,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct DiagWire {
    n: usize,
    #[serde(rename = "D")]
    d: u32,
    kind: String,
    values: Vec<DiagEntryWire>,
}

pub fn diagonal_to_json(s: &DiagonalSequence) -> Value {
    to_value(&DiagWire {
        n: s.dim(),
        d: s.order(),
        kind: match s.kind() {
            SequenceKind::Diagonal => "t".into(),
            SequenceKind::Canonical => "c".into(),
        },
        values: s
            .values()
            .map(|(a, v)| DiagEntryWire {
                alpha: a.entries().to_vec(),
                v: v.to_string(),
            })
            .collect(),
    })
}

pub fn diagonal_from_json(v: &Value) -> Result<DiagonalSequence> {
    let w: DiagWire = from_value(v, "diagonal sequence")?;
    let kind = match w.kind.as_str() {
        "t" => SequenceKind::Diagonal,
        "c" => SequenceKind::Canonical,
        other => {
            return Err(Error::Parse(format!(
                "kind must be \"t\" or \"c\", got {other:?}"
            )))
        }
    };
    let n = w.n;
    let values = w
        .values
        .iter()
        .map(|e| Ok((check_alpha(&e.alpha, n)?, parse_rational(&e.v)?)))
        .collect::<Result<Vec<_>>>()?;
    DiagonalSequence::from_values(n, w.d, kind, values)
}

#[derive(Serialize, Deserialize)]
struct AtomWire {
    z: Vec<String>,
    w: String,
}

#[derive(Serialize, Deserialize)]
struct TripletWire {
    n: usize,
    #[serde(rename = "Sigma")]
    sigma: Vec<Vec<String>>,
    b: Vec<String>,
    #[serde(default)]
    nu: Vec<AtomWire>,
}

pub fn triplet_to_json(t: &LevyTriplet) -> Value {
    to_value(&TripletWire {
        n: t.dim(),
        sigma: t.sigma().iter().map(|r| strings(r)).collect(),
        b: strings(t.drift()),
        nu: t
            .atoms()
            .iter()
            .map(|(z, w)| AtomWire {
                z: strings(z),
                w: w.to_string(),
            })
            .collect(),
    })
}

pub fn triplet_from_json(v: &Value) -> Result<LevyTriplet> {
    let w: TripletWire = from_value(v, "triplet")?;
    if w.b.len() != w.n {
        return Err(Error::InvalidTriplet(format!(
            "b has {} entries, expected {}",
            w.b.len(),
            w.n
        )));
    }
    let sigma = w
        .sigma
        .iter()
        .map(|r| parse_all(r))
        .collect::<Result<Vec<_>>>()?;
    let nu =
        w.nu.iter()
            .map(|a| Ok((parse_all(&a.z)?, parse_rational(&a.w)?)))
            .collect::<Result<Vec<_>>>()?;
    LevyTriplet::new(sigma, parse_all(&w.b)?, nu)
}

pub fn grid_to_json(grid: &[Vec<Rational>]) -> Value {
    to_value(&grid.iter().map(|y| strings(y)).collect::<Vec<_>>())
}

/// An array of points; a bare array of rationals is read as `n = 1` points.
pub fn grid_from_json(v: &Value) -> Result<Vec<Vec<Rational>>> {
    if let Ok(points) = Vec::<Vec<String>>::deserialize(v) {
        return points.iter().map(|p| parse_all(p)).collect();
    }
    let flat: Vec<String> = from_value(v, "grid")?;
    flat.iter().map(|s| Ok(vec![parse_rational(s)?])).collect()
}

/// Comma-separated rationals, as given on the command line.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_rational)
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ApproxWire {
    approx: bool,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct CertWire {
    #[serde(rename = "K")]
    k: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    y: Vec<String>,
    construction: String,
    witness: PolyWire,
    root: PolyWire,
    factor: PolyWire,
    value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigenvalue: Option<ApproxWire>,
}

/// `t` records the semigroup time when the certificate refutes `exp(tA)`.
pub fn certificate_to_json(c: &ViolationCertificate, t: Option<&Rational>) -> Value {
    to_value(&CertWire {
        k: c.k.to_string(),
        t: t.map(|t| t.to_string()),
        y: strings(&c.y),
        construction: c.construction.to_string(),
        witness: PolyWire::from_poly(&c.witness),
        root: PolyWire::from_poly(&c.root),
        factor: PolyWire::from_poly(&c.factor),
        value: c.value.to_string(),
        eigenvalue: Some(ApproxWire {
            approx: true,
            value: c.eigenvalue,
        }),
    })
}

pub fn certificate_from_json(v: &Value) -> Result<(ViolationCertificate, Option<Rational>)> {
    let w: CertWire = from_value(v, "certificate")?;
    let construction = match w.construction.as_str() {
        "square" => Construction::Square,
        "localized-square" => Construction::LocalizedSquare,
        other => return Err(Error::Parse(format!("unknown construction {other:?}"))),
    };
    let t = w.t.as_deref().map(parse_rational).transpose()?;
    let cert = ViolationCertificate {
        k: w.k.parse::<KSpec>()?,
        y: parse_all(&w.y)?,
        witness: w.witness.into_poly()?,
        root: w.root.into_poly()?,
        factor: w.factor.into_poly()?,
        value: parse_rational(&w.value)?,
        construction,
        eigenvalue: w.eigenvalue.map_or(f64::NAN, |e| e.value),
    };
    Ok((cert, t))
}

#[derive(Serialize, Deserialize)]
struct SubspaceWire {
    basis: Vec<PolyWire>,
    matrix: Vec<Vec<String>>,
}

pub fn subspace_to_json(s: &InvariantSubspace) -> Value {
    let m = s.matrix();
    to_value(&SubspaceWire {
        basis: s.basis().iter().map(PolyWire::from_poly).collect(),
        matrix: (0..m.rows()).map(|i| strings(m.row(i))).collect(),
    })
}

/// The result is untrusted until [`InvariantSubspace::reverify`] passes.
pub fn subspace_from_json(v: &Value) -> Result<InvariantSubspace> {
    let w: SubspaceWire = from_value(v, "membership certificate")?;
    let basis = w
        .basis
        .into_iter()
        .map(PolyWire::into_poly)
        .collect::<Result<Vec<_>>>()?;
    let rows = w
        .matrix
        .iter()
        .map(|r| parse_all(r))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != basis.len() || rows.iter().any(|r| r.len() != basis.len()) {
        return Err(Error::Parse("matrix shape does not match basis".into()));
    }
    Ok(InvariantSubspace::from_parts(
        basis,
        QMatrix::from_rows(rows),
    ))
}
