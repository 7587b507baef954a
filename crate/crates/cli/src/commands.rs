use std::collections::{BTreeMap, BTreeSet};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use pospres_core::json::{
    any_const_operator_from_json, approx_polynomial_to_json, certificate_from_json,
    certificate_to_json, const_operator_from_json, const_operator_to_json, diagonal_from_json,
    diagonal_to_json, grid_from_json, operator_from_json, operator_to_json, parse_rational,
    parse_rational_list, polynomial_from_json, polynomial_to_json, subspace_to_json,
    triplet_from_json,
};
use pospres_core::levy::{
    evolve, refute_generator, refute_poly_generator, synth_generator, SweepOutcome,
};
use pospres_core::membership::{
    check_in_g, exp_on_subspace, limit_formula_check, Budgets, ExhaustedBudget, MembershipVerdict,
};
use pospres_core::moment::{
    preserver_test, verify_certificate, KSpec, PreserverOutcome, Warning, WarningKind,
};
use pospres_core::{
    canonical_from_action, ConstOperator, Degree, DiffOperator, Error, Exponent, Polynomial,
    Rational, SequenceKind,
};

use crate::Command;

pub enum Outcome {
    Ok(Value),
    Violation(Value),
    BudgetExceeded(Value),
    Error(Value),
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Ok(_) => "ok",
            Outcome::Violation(_) => "violation",
            Outcome::BudgetExceeded(_) => "budget-exceeded",
            Outcome::Error(_) => "error",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Ok(_) => 0,
            Outcome::Error(_) => 1,
            Outcome::BudgetExceeded(_) => 2,
            Outcome::Violation(_) => 3,
        }
    }

    pub fn payload(&self) -> &Value {
        match self {
            Outcome::Ok(v)
            | Outcome::Violation(v)
            | Outcome::BudgetExceeded(v)
            | Outcome::Error(v) => v,
        }
    }

    /// Degree-budget failures of the core library count as budget exhaustion.
    pub fn from_error(e: anyhow::Error) -> Outcome {
        let message = format!("{e:#}");
        match e.downcast_ref::<Error>() {
            Some(Error::DegreeBudget { .. })
            | Some(Error::DegreeBudgetExceeded { .. })
            | Some(Error::DegreeBudgetExceedsOperatorOrder { .. }) => {
                Outcome::BudgetExceeded(json!({ "message": message }))
            }
            _ => Outcome::Error(json!({ "message": message })),
        }
    }
}

fn load(path: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

/// A verdict printed by `check` or `sweep` may stand in for the bare
/// artifact stored under `key` in its payload.
fn unwrap_verdict(v: Value, key: &str) -> Value {
    let payload = match v.get("payload") {
        Some(p) if v.get("status").is_some() => p.clone(),
        _ => v,
    };
    match payload.get(key) {
        Some(inner) if inner.is_object() => inner.clone(),
        _ => payload,
    }
}

/// General operator format first, then the constant-coefficient one.
fn load_operator(path: &str) -> Result<DiffOperator> {
    let v = unwrap_verdict(load(path)?, "operator");
    match operator_from_json(&v) {
        Ok(t) => Ok(t),
        Err(first) => match const_operator_from_json(&v) {
            Ok(a) => Ok(a.to_diff_operator()),
            Err(_) => Err(first).with_context(|| format!("reading operator from {path}")),
        },
    }
}

fn load_const(path: &str) -> Result<ConstOperator> {
    any_const_operator_from_json(&load(path)?).with_context(|| format!("reading {path}"))
}

fn load_poly(path: &str) -> Result<Polynomial> {
    polynomial_from_json(&load(path)?).with_context(|| format!("reading {path}"))
}

fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

fn grid(spec: &str, k: &KSpec, n: usize) -> Result<Vec<Vec<Rational>>> {
    if spec == "auto" {
        Ok(k.default_grid(n))
    } else {
        Ok(grid_from_json(&load(spec)?)?)
    }
}

/// Re-expresses `a` at order `d`, dropping or zero-padding higher terms.
fn at_order(a: &ConstOperator, d: u32) -> Result<ConstOperator> {
    let entries = a
        .entries()
        .filter(|(alpha, _)| alpha.degree() <= d)
        .map(|(alpha, c)| (alpha.clone(), c.clone()));
    Ok(ConstOperator::from_table(a.dim(), d, entries)?)
}

fn warnings_json(ws: &[Warning]) -> Vec<Value> {
    ws.iter()
        .map(|w| {
            let y: Vec<String> = w.y.iter().map(|v| v.to_string()).collect();
            let (kind, ev) = match w.kind {
                WarningKind::Borderline { min_eigenvalue } => ("borderline", min_eigenvalue),
                WarningKind::UnconfirmedWitness { eigenvalue } => {
                    ("unconfirmed-witness", eigenvalue)
                }
            };
            json!({"y": y, "kind": kind, "eigenvalue": {"approx": true, "value": ev}})
        })
        .collect()
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Canon { action, order } => canon(action, *order),
        Command::Apply { operator, poly } => {
            let t = load_operator(operator)?;
            let f = load_poly(poly)?;
            Ok(Outcome::Ok(polynomial_to_json(&t.apply(&f)?)))
        }
        Command::Diag { sequence, operator } => {
            let s = diagonal_from_json(&load(sequence)?)?;
            if *operator {
                Ok(Outcome::Ok(operator_to_json(&s.to_canonical())))
            } else {
                let other = match s.kind() {
                    SequenceKind::Diagonal => s.t_to_c(),
                    SequenceKind::Canonical => s.c_to_t(),
                };
                Ok(Outcome::Ok(diagonal_to_json(&other)))
            }
        }
        Command::Exp { algebra, order, t } => {
            let a = at_order(&load_const(algebra)?, *order)?;
            let e = a.exp_scaled(&rational(t)?)?;
            Ok(Outcome::Ok(const_operator_to_json(&e)))
        }
        Command::Log { group, order } => {
            let g = at_order(&load_const(group)?, *order)?;
            Ok(Outcome::Ok(const_operator_to_json(&g.log()?)))
        }
        Command::Member {
            operator,
            seed_degree,
            degree_budget,
            iteration_budget,
            poly,
            t,
            limit,
        } => member(
            operator,
            Budgets {
                seed_degree: *seed_degree,
                degree_budget: *degree_budget,
                iteration_budget: *iteration_budget,
            },
            poly.as_deref(),
            t,
            limit.as_deref(),
        ),
        Command::Check {
            operator,
            k,
            grid: grid_spec,
            order,
            tol,
        } => {
            let t = load_operator(operator)?;
            let k: KSpec = k.parse()?;
            let ys = grid(grid_spec, &k, t.dim())?;
            match preserver_test(&t, &k, &ys, *order, *tol)? {
                PreserverOutcome::Violation(cert) => {
                    Ok(Outcome::Violation(certificate_to_json(&cert, None)))
                }
                PreserverOutcome::NoViolationFound { warnings } => Ok(Outcome::Ok(json!({
                    "result": "no-violation-found",
                    "grid_points": ys.len(),
                    "warnings": warnings_json(&warnings),
                }))),
            }
        }
        Command::Verify {
            certificate,
            operator,
        } => {
            let (cert, _) =
                certificate_from_json(&unwrap_verdict(load(certificate)?, "certificate"))?;
            let t = load_operator(operator)?;
            if verify_certificate(&t, &cert, &cert.k) {
                Ok(Outcome::Ok(json!({ "valid": true })))
            } else {
                Ok(Outcome::Error(json!({
                    "valid": false,
                    "message": "certificate does not refute this operator",
                })))
            }
        }
        Command::Synth { triplet, order } => {
            let trip = triplet_from_json(&load(triplet)?)?;
            Ok(Outcome::Ok(const_operator_to_json(&synth_generator(
                &trip, *order,
            )?)))
        }
        Command::Evolve {
            triplet,
            t,
            poly,
            csv,
            times,
        } => {
            let trip = triplet_from_json(&load(triplet)?)?;
            let f = load_poly(poly)?;
            let t = rational(t)?;
            let g = evolve(&trip, &t, &f)?;
            if let Some(path) = csv {
                let times = match times {
                    Some(s) => parse_rational_list(s)?,
                    None => vec![t.clone()],
                };
                let rows = times
                    .iter()
                    .map(|s| Ok((s.clone(), evolve(&trip, s, &f)?)))
                    .collect::<Result<Vec<_>>>()?;
                write_csv(path, &rows)?;
            }
            Ok(Outcome::Ok(polynomial_to_json(&g)))
        }
        Command::Sweep {
            gen,
            k,
            tgrid,
            ygrid,
            order,
            tol,
        } => sweep(gen, k, tgrid, ygrid, *order, *tol),
    }
}

fn canon(path: &str, order: u32) -> Result<Outcome> {
    let v = load(path)?;
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| anyhow!("action: missing \"n\""))? as usize;
    let images = v["images"]
        .as_array()
        .ok_or_else(|| anyhow!("action: missing \"images\" array"))?;
    let mut table = BTreeMap::new();
    for entry in images {
        let alpha: Vec<u32> =
            serde_json::from_value(entry["alpha"].clone()).context("action: bad \"alpha\"")?;
        let alpha = Exponent::new(alpha);
        if alpha.dim() != n {
            bail!("action: exponent {alpha} does not have {n} entries");
        }
        if alpha.degree() > order {
            bail!("action: image of x^{alpha} lies above order {order}");
        }
        table.insert(alpha, polynomial_from_json(&entry["image"])?);
    }
    let t = canonical_from_action(
        |a| table.get(a).cloned().unwrap_or_else(|| Polynomial::zero(n)),
        n,
        order,
    )?;
    Ok(Outcome::Ok(operator_to_json(&t)))
}

fn member(
    path: &str,
    budgets: Budgets,
    poly: Option<&str>,
    t: &str,
    limit: Option<&str>,
) -> Result<Outcome> {
    let a = load_operator(path)?;
    match check_in_g(&a, budgets)? {
        MembershipVerdict::BudgetExceeded { trace } => {
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    let degree = match s.degree {
                        Degree::NegInfinity => Value::Null,
                        Degree::Finite(d) => json!(d),
                    };
                    json!({"iterate": s.iterate, "degree": degree})
                })
                .collect();
            let exhausted = match trace.exhausted {
                ExhaustedBudget::Degree => "degree",
                ExhaustedBudget::Iterations => "iterations",
            };
            Ok(Outcome::BudgetExceeded(json!({
                "verdict": "budget-exceeded",
                "seed": trace.seed.entries(),
                "exhausted": exhausted,
                "trace": steps,
            })))
        }
        MembershipVerdict::Member { filtration } => {
            let mut payload = json!({
                "verdict": "member",
                "filtration": filtration.iter().map(subspace_to_json).collect::<Vec<_>>(),
            });
            if let Some(p) = poly {
                let f = load_poly(p)?;
                let level = match f.degree() {
                    Degree::NegInfinity => 0,
                    Degree::Finite(d) => d as usize,
                };
                let cert = filtration.get(level).ok_or_else(|| {
                    anyhow!(
                        "polynomial degree {level} exceeds the seed degree {}",
                        budgets.seed_degree
                    )
                })?;
                let tf = pospres_core::poly::rational_to_f64(&rational(t)?);
                let e = exp_on_subspace(&a, cert, tf, &f)?;
                payload["exp"] = json!({
                    "t": t,
                    "result": approx_polynomial_to_json(&e.result),
                    "pade_degree": e.pade_degree,
                    "squarings": e.squarings,
                });
                if let Some(ks) = limit {
                    let ks = ks
                        .split(',')
                        .map(|k| {
                            k.trim()
                                .parse::<u64>()
                                .with_context(|| format!("bad k {k:?}"))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let table = limit_formula_check(&a, cert, &f, &ks)?;
                    let rows: Vec<Value> = table
                        .rows
                        .iter()
                        .map(|r| {
                            json!({
                                "k": r.k,
                                "forward_deviation": r.forward_deviation,
                                "backward_deviation": r.backward_deviation,
                            })
                        })
                        .collect();
                    payload["limit"] = json!({"approx": true, "rows": rows});
                }
            } else if limit.is_some() {
                bail!("--limit needs --poly");
            }
            Ok(Outcome::Ok(payload))
        }
    }
}

fn sweep(gen: &str, k: &str, tgrid: &str, ygrid: &str, order: u32, tol: f64) -> Result<Outcome> {
    let v = load(gen)?;
    let k: KSpec = k.parse()?;
    let ts = parse_rational_list(tgrid)?;
    let outcome = match any_const_operator_from_json(&v) {
        Ok(a) => {
            let ys = grid(ygrid, &k, a.dim())?;
            refute_generator(&a, &k, &ts, &ys, order, tol)?
        }
        Err(_) => {
            let a =
                operator_from_json(&v).with_context(|| format!("reading generator from {gen}"))?;
            let ys = grid(ygrid, &k, a.dim())?;
            refute_poly_generator(&a, &k, &ts, &ys, order, tol)?
        }
    };
    match outcome {
        SweepOutcome::Violation {
            t,
            operator,
            certificate,
        } => Ok(Outcome::Violation(json!({
            "t": t.to_string(),
            "certificate": certificate_to_json(&certificate, Some(&t)),
            "operator": operator_to_json(&operator),
        }))),
        SweepOutcome::NoViolationFound { warnings } => {
            let ws: Vec<Value> = warnings
                .iter()
                .zip(warnings_json(
                    &warnings.iter().map(|(_, w)| w.clone()).collect::<Vec<_>>(),
                ))
                .map(|((t, _), mut w)| {
                    w["t"] = json!(t.to_string());
                    w
                })
                .collect();
            Ok(Outcome::Ok(json!({
                "result": "no-violation-found",
                "times": ts.len(),
                "warnings": ws,
            })))
        }
    }
}

/// One row per time, one column per monomial, exact rational entries.
fn write_csv(path: &str, rows: &[(Rational, Polynomial)]) -> Result<()> {
    let alphas: BTreeSet<Exponent> = rows
        .iter()
        .flat_map(|(_, p)| p.terms().map(|(a, _)| a.clone()))
        .collect();
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {path}"))?;
    let mut header = vec!["t".to_string()];
    header.extend(alphas.iter().map(|a| a.to_string()));
    w.write_record(&header)?;
    for (t, p) in rows {
        let mut rec = vec![t.to_string()];
        rec.extend(alphas.iter().map(|a| p.coeff(a).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
