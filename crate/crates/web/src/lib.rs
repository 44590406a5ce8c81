//! wasm-bindgen exports for the static page in `www/`. Every export returns
//! a JSON string; failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mdzv::eval::verify_named;
use mdzv::formulas::{self, MdzvVariant, Notation};
use mdzv::shuffle::shuffle_product;
use mdzv::{Combination, EvalContext, FieldSpec, PairingStructure, RefinedTerm, TruncationSet};

/// Largest radius the page may ask for; keeps pair sums interactive.
pub const MAX_RADIUS: f64 = 30.0;

#[derive(Serialize)]
struct Expansion {
    text: String,
    latex: String,
    terms: Vec<TermRow>,
    coefficient_sum: i64,
}

#[derive(Serialize)]
struct TermRow {
    coeff: i64,
    perm: String,
    exponents: Vec<u32>,
}

#[derive(Serialize)]
struct Point {
    a: i64,
    b: i64,
    x: f64,
    y: f64,
    norm: i64,
}

#[derive(Serialize)]
struct Report {
    identity: String,
    lhs: f64,
    rhs: f64,
    rel_err: f64,
    passed: bool,
    points: usize,
    terms: usize,
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("plain data serializes"),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn expansion(c: &Combination, notation: Notation) -> Expansion {
    Expansion {
        text: c.to_string(),
        latex: formulas::to_latex(c, notation),
        terms: c
            .iter()
            .map(|(t, coeff)| TermRow { coeff, perm: t.order().to_string(), exponents: t.exponents().to_vec() })
            .collect(),
        coefficient_sum: c.coefficient_sum() as i64,
    }
}

fn build(kind: &str, first: &str, second: &str, simplify: bool) -> Result<Combination, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let int = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
    match kind {
        "selfie" => formulas::self_shuffle_zeta_with(int(first)?, simplify).map_err(|e| err(&e)),
        "selfie-mdzv" => {
            let v: MdzvVariant = first.parse().map_err(|e| err(&e))?;
            formulas::self_shuffle_mdzv(v, simplify).map_err(|e| err(&e))
        }
        "shuffle" => {
            let a: RefinedTerm = first.trim().parse().map_err(|e| err(&e))?;
            let b: RefinedTerm = second.trim().parse().map_err(|e| err(&e))?;
            if a.k() != 2 || b.k() != 2 {
                return Err("both factors must be depth one, like (1):2,2".into());
            }
            let pairing = PairingStructure::standard(4).map_err(|e| err(&e))?;
            shuffle_product(&a, &b, &pairing, simplify).map_err(|e| err(&e))
        }
        "product" => formulas::product_zeta(int(first)?, int(second)?).map_err(|e| err(&e)),
        other => Err(format!("unknown expansion {other:?}")),
    }
}

/// `kind` is selfie (first = weight), selfie-mdzv (first = variant),
/// shuffle (two terms) or product (two weights).
#[wasm_bindgen]
pub fn expand(kind: &str, first: &str, second: &str, simplify: bool, semicolon: bool) -> String {
    let notation = if semicolon { Notation::Semicolon } else { Notation::Comma };
    to_json(build(kind, first, second, simplify).map(|c| expansion(&c, notation)))
}

fn truncation(d: i32, radius: f64) -> Result<TruncationSet, String> {
    if radius > MAX_RADIUS {
        return Err(format!("radius {radius} is above the demo limit {MAX_RADIUS}"));
    }
    let field = FieldSpec::new(d as i64).map_err(|e| e.to_string())?;
    TruncationSet::new(field, radius, false).map_err(|e| e.to_string())
}

/// Cone elements of `Q(√d)` up to `radius`, in summation order.
#[wasm_bindgen]
pub fn cone_points(d: i32, radius: f64) -> String {
    to_json(truncation(d, radius).map(|set| {
        let field = set.field();
        set.elements()
            .iter()
            .map(|&x| {
                let z = field.embed::<f64>(x);
                Point { a: x.a, b: x.b, x: z.re, y: z.im, norm: field.norm(x) }
            })
            .collect::<Vec<_>>()
    }))
}

#[wasm_bindgen]
pub fn catalog() -> String {
    to_json(Ok(formulas::catalog_names()))
}

/// Both sides of a named identity summed over the same truncation set.
#[wasm_bindgen]
pub fn verify(identity: &str, d: i32, radius: f64, tol: f64) -> String {
    to_json(truncation(d, radius).and_then(|set| {
        let ctx = EvalContext::new(set, PairingStructure::standard(4).map_err(|e| e.to_string())?);
        let r = verify_named(identity, &ctx, tol).map_err(|e| e.to_string())?;
        Ok(Report {
            identity: r.identity,
            lhs: r.lhs.re,
            rhs: r.rhs.re,
            rel_err: r.rel_err,
            passed: r.passed,
            points: r.points,
            terms: r.terms,
        })
    }))
}
