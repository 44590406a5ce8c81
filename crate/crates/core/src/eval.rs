//! Truncated lattice sums of refined MDZVs and numeric checks of identities.
//!
//! Cone elements are visited in `(norm, a, b)` order. One summation variable
//! (`k = 2`) gives one shell per element; two variables (`k = 4`) give shell
//! `m` = all pairs whose larger index is `m`. Shell totals are merged
//! sequentially, so the sum over radius `R` is bit-for-bit a prefix of the
//! sum over any larger radius, and parallel runs reproduce serial ones.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formulas::{self, FormulaError, Lhs, MdzvVariant, NamedIdentity};
use crate::numfield::{FieldSpec, RingElement, TruncationSet};
use crate::real::{Complex, ComplexAccumulator, Extended, Real};
use crate::shuffle::{Combination, RefinedTerm};
use crate::symmetry::{PairingStructure, PermError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("singular term: {0}")]
    SingularTerm(String),
    #[error("term has k = {term}, evaluation needs an even k matching the pairing (k = {pairing})")]
    Arity { term: usize, pairing: usize },
    #[error("mixed k in one combination")]
    MixedArity,
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error(transparent)]
    Formula(FormulaError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

impl From<FormulaError> for EvalError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::UnknownIdentity(name) => EvalError::UnknownIdentity(name),
            other => EvalError::Formula(other),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Double,
    /// 200-bit software floats.
    Extended,
}

impl Precision {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Precision::Double => 1e-10,
            Precision::Extended => 1e-30,
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision {other:?}: expected double or extended")),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SummationPolicy {
    Ordered,
    #[default]
    Compensated,
}

impl SummationPolicy {
    fn compensated(self) -> bool {
        self == SummationPolicy::Compensated
    }
}

/// Where and how to sum.
#[derive(Clone, Debug)]
pub struct EvalContext {
    pub truncation: TruncationSet,
    pub pairing: PairingStructure,
    pub policy: SummationPolicy,
    pub precision: Precision,
}

impl EvalContext {
    pub fn new(truncation: TruncationSet, pairing: PairingStructure) -> Self {
        Self { truncation, pairing, policy: SummationPolicy::default(), precision: Precision::default() }
    }

    pub fn with_pairing(&self, pairing: PairingStructure) -> Self {
        Self { pairing, ..self.clone() }
    }

    pub fn with_policy(mut self, policy: SummationPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn field(&self) -> FieldSpec {
        self.truncation.field()
    }

    fn pairing_for(&self, k: usize) -> Result<PairingStructure, EvalError> {
        if k == self.pairing.k() {
            Ok(self.pairing.clone())
        } else if k.is_multiple_of(2) && k > 0 {
            Ok(PairingStructure::standard(k)?)
        } else {
            Err(EvalError::Arity { term: k, pairing: self.pairing.k() })
        }
    }
}

/// Cone elements embedded in the chosen backend.
struct Points<S> {
    exact: Vec<RingElement>,
    values: Vec<Complex<S>>,
    field: FieldSpec,
}

impl<S: Real> Points<S> {
    fn new(set: &TruncationSet) -> Self {
        let field = set.field();
        let omega = field.omega::<S>();
        let values = set.elements().iter().map(|&x| field.embed_with(&omega, x)).collect();
        Self { exact: set.elements().to_vec(), values, field }
    }

    fn norm(&self, x: RingElement) -> S {
        S::from_i64(self.field.norm(x))
    }
}

/// Sums `f` over all `vars`-tuples of point indices, shell by shell.
/// Returns the running total after each shell.
fn shell_totals<S, F>(n: usize, vars: usize, policy: SummationPolicy, f: F) -> Result<Vec<Complex<S>>, EvalError>
where
    S: Real,
    F: Fn(&[usize]) -> Result<Complex<S>, EvalError> + Sync,
{
    assert!(vars == 1 || vars == 2, "one or two summation variables");
    let shell = |m: usize| -> Result<Complex<S>, EvalError> {
        let mut acc = ComplexAccumulator::new(policy.compensated());
        if vars == 1 {
            acc.add(&f(&[m])?);
        } else {
            for i in 0..=m {
                acc.add(&f(&[i, m])?);
            }
            for j in 0..m {
                acc.add(&f(&[m, j])?);
            }
        }
        Ok(acc.value())
    };

    #[cfg(feature = "parallel")]
    let shells: Vec<Complex<S>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(shell).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let shells: Vec<Complex<S>> = (0..n).map(shell).collect::<Result<_, _>>()?;

    let mut acc = ComplexAccumulator::new(policy.compensated());
    let mut running = Vec::with_capacity(n);
    for s in &shells {
        acc.add(s);
        running.push(acc.value());
    }
    Ok(running)
}

fn total<S: Real>(running: Vec<Complex<S>>) -> Complex<S> {
    running.last().cloned().unwrap_or_else(Complex::zero)
}

/// A combination compiled to prefix-sum masks.
struct Plan<S> {
    k: usize,
    pairing: PairingStructure,
    // per term: coefficient and (mask, exponent) factors
    terms: Vec<(S, Vec<(usize, u32)>)>,
    // max exponent per needed mask, 0 when unused
    max_exp: Vec<u32>,
}

impl<S: Real> Plan<S> {
    fn new(c: &Combination, ctx: &EvalContext) -> Result<Self, EvalError> {
        let k = c.k().unwrap_or(ctx.pairing.k());
        if c.iter().any(|(t, _)| t.k() != k) {
            return Err(EvalError::MixedArity);
        }
        let pairing = ctx.pairing_for(k)?;
        if pairing.k() > 4 {
            return Err(EvalError::Arity { term: k, pairing: 4 });
        }
        let mut max_exp = vec![0u32; 1 << k];
        let mut terms = Vec::new();
        for (t, coeff) in c.iter() {
            let mut mask = 0usize;
            let mut factors = Vec::with_capacity(k);
            for (j, &e) in t.exponents().iter().enumerate() {
                mask |= 1 << (t.order().apply(j + 1) - 1);
                factors.push((mask, e));
                max_exp[mask] = max_exp[mask].max(e);
            }
            terms.push((S::from_i64(coeff), factors));
        }
        Ok(Self { k, pairing, terms, max_exp })
    }

    fn vars(&self) -> usize {
        self.k / 2
    }

    fn integrand(&self, points: &Points<S>, idx: &[usize], policy: SummationPolicy) -> Result<Complex<S>, EvalError> {
        let mut gens = Vec::with_capacity(self.k);
        for g in 1..=self.k {
            let (var, conj) = self.pairing.role_of(g).expect("pairing covers 1..k");
            let z = &points.values[idx[var]];
            gens.push(if conj { z.conj() } else { z.clone() });
        }
        let mut powers: Vec<Vec<Complex<S>>> = vec![Vec::new(); self.max_exp.len()];
        for (mask, &top) in self.max_exp.iter().enumerate() {
            if top == 0 {
                continue;
            }
            let mut sum = Complex::zero();
            for (g, value) in gens.iter().enumerate() {
                if mask & (1 << g) != 0 {
                    sum = sum.add(value);
                }
            }
            let inv = sum.recip().ok_or_else(|| {
                let at: Vec<String> = idx.iter().map(|&i| points.exact[i].to_string()).collect();
                EvalError::SingularTerm(format!("a prefix sum vanishes at ({})", at.join(", ")))
            })?;
            let mut p = vec![Complex::one()];
            for e in 1..=top as usize {
                p.push(p[e - 1].mul(&inv));
            }
            powers[mask] = p;
        }
        let mut acc = ComplexAccumulator::new(policy.compensated());
        for (coeff, factors) in &self.terms {
            let mut v = Complex::from_real(coeff.clone());
            for &(mask, e) in factors {
                v = v.mul(&powers[mask][e as usize]);
            }
            acc.add(&v);
        }
        Ok(acc.value())
    }

    fn running(&self, points: &Points<S>, ctx: &EvalContext) -> Result<Vec<Complex<S>>, EvalError> {
        if self.terms.is_empty() {
            return Ok(vec![Complex::zero(); points.values.len()]);
        }
        shell_totals(points.values.len(), self.vars(), ctx.policy, |idx| self.integrand(points, idx, ctx.policy))
    }
}

/// `Σ coeff · ζ^ρ(e)` over the truncation set, in backend `S`.
pub fn eval_combination_in<S: Real>(c: &Combination, ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    let points = Points::<S>::new(&ctx.truncation);
    let plan = Plan::<S>::new(c, ctx)?;
    Ok(total(plan.running(&points, ctx)?))
}

pub fn eval_term_in<S: Real>(t: &RefinedTerm, ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    eval_combination_in(&Combination::single(t.clone(), 1), ctx)
}

pub fn eval_combination(c: &Combination, ctx: &EvalContext) -> Result<Complex<f64>, EvalError> {
    eval_combination_in::<f64>(c, ctx)
}

pub fn eval_term(t: &RefinedTerm, ctx: &EvalContext) -> Result<Complex<f64>, EvalError> {
    eval_term_in::<f64>(t, ctx)
}

/// Running totals after each shell, in double precision. The value at
/// index `i` only depends on the first `i + 1` cone elements.
pub fn partial_sums(c: &Combination, ctx: &EvalContext) -> Result<Vec<Complex<f64>>, EvalError> {
    let points = Points::<f64>::new(&ctx.truncation);
    Plan::<f64>::new(c, ctx)?.running(&points, ctx)
}

/// Product of the two single-variable truncated sums.
pub fn eval_product_lhs_in<S: Real>(a: &RefinedTerm, b: &RefinedTerm, ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    for t in [a, b] {
        if t.k() != 2 {
            return Err(EvalError::Arity { term: t.k(), pairing: 2 });
        }
    }
    let ctx2 = ctx.with_pairing(PairingStructure::standard(2)?);
    Ok(eval_term_in::<S>(a, &ctx2)?.mul(&eval_term_in::<S>(b, &ctx2)?))
}

pub fn eval_product_lhs(a: &RefinedTerm, b: &RefinedTerm, ctx: &EvalContext) -> Result<Complex<f64>, EvalError> {
    eval_product_lhs_in::<f64>(a, b, ctx)
}

fn pow_recip<S: Real>(x: &S, n: u32) -> S {
    let mut p = S::one();
    for _ in 0..n {
        p = p.mul(x);
    }
    S::one().div(&p)
}

fn dedekind<S: Real>(points: &Points<S>, n: u32, ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    let running = shell_totals(points.values.len(), 1, ctx.policy, |idx| {
        Ok(Complex::from_real(pow_recip(&points.norm(points.exact[idx[0]]), n)))
    })?;
    Ok(total(running))
}

fn mdzv_integrand<S: Real>(points: &Points<S>, variant: MdzvVariant, idx: &[usize]) -> Result<Complex<S>, EvalError> {
    let (a, b) = (points.exact[idx[0]], points.exact[idx[1]]);
    let sum = a + b;
    if sum.is_zero() {
        return Err(EvalError::SingularTerm(format!("α + β = 0 at ({a}, {b})")));
    }
    let outer = pow_recip(&points.norm(sum), 2);
    Ok(match variant {
        MdzvVariant::Separated => Complex::from_real(outer.div(&points.norm(a))),
        MdzvVariant::Crossed => {
            let inner = points.values[idx[0]].conj().mul(&points.values[idx[1]]);
            inner.recip().expect("cone elements are nonzero").scale(&outer)
        }
    })
}

fn mdzv<S: Real>(points: &Points<S>, variants: &[(MdzvVariant, i64)], ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    let running = shell_totals(points.values.len(), 2, ctx.policy, |idx| {
        let mut acc = Complex::zero();
        for &(v, sign) in variants {
            acc = acc.add(&mdzv_integrand(points, v, idx)?.scale(&S::from_i64(sign)));
        }
        Ok(acc)
    })?;
    Ok(total(running))
}

/// The left-hand side of a named identity, summed directly from its
/// definition rather than from any expansion.
pub fn eval_lhs_in<S: Real>(lhs: &Lhs, ctx: &EvalContext) -> Result<Complex<S>, EvalError> {
    let points = Points::<S>::new(&ctx.truncation);
    match lhs {
        Lhs::DedekindZeta(n) => dedekind(&points, *n, ctx),
        Lhs::Mdzv(v) => mdzv(&points, &[(*v, 1)], ctx),
        Lhs::MdzvDifference => mdzv(&points, &[(MdzvVariant::Separated, 1), (MdzvVariant::Crossed, -1)], ctx),
        Lhs::TermProduct(a, b) => eval_product_lhs_in(a, b, ctx),
        Lhs::ZetaProduct(n1, n2) => Ok(dedekind(&points, *n1, ctx)?.mul(&dedekind(&points, *n2, ctx)?)),
        Lhs::Term(t) => eval_term_in(t, &ctx.with_pairing(PairingStructure::standard(t.k())?)),
    }
}

/// A value in both backends' common currency.
#[derive(Clone, Debug, PartialEq)]
pub struct Value {
    pub re: f64,
    pub im: f64,
    pub re_text: String,
    pub im_text: String,
}

impl<S: Real> From<&Complex<S>> for Value {
    fn from(z: &Complex<S>) -> Self {
        let digits = S::DIGITS;
        Value { re: z.re.to_f64(), im: z.im.to_f64(), re_text: z.re.to_decimal_string(digits), im_text: z.im.to_decimal_string(digits) }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.re == 0.0 && self.im == 0.0 {
            return f.write_str("0");
        }
        write!(f, "{} {} {}i", self.re_text, if self.im < 0.0 || self.im_text.starts_with('-') { "-" } else { "+" }, self.im_text.trim_start_matches('-'))
    }
}

/// Evaluates a combination at the context's precision.
pub fn evaluate(c: &Combination, ctx: &EvalContext) -> Result<Value, EvalError> {
    Ok(match ctx.precision {
        Precision::Double => Value::from(&eval_combination_in::<f64>(c, ctx)?),
        Precision::Extended => Value::from(&eval_combination_in::<Extended>(c, ctx)?),
    })
}

/// `None` when every exponent pattern gives an absolutely convergent series.
pub fn convergence_warning(t: &RefinedTerm) -> Option<String> {
    let last = *t.exponents().last()?;
    (last < 2).then(|| format!("{t}: last exponent {last} < 2, the full series diverges; only the truncated sum is meaningful"))
}

#[derive(Clone, Debug)]
pub struct EvalReport {
    pub identity: String,
    pub lhs: Value,
    pub rhs: Value,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub passed: bool,
    pub terms: usize,
    pub points: usize,
    pub radius: f64,
    pub field: FieldSpec,
    pub precision: Precision,
    pub seconds: f64,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity   {}", self.identity)?;
        writeln!(f, "field      {}  radius {}  points {}  precision {}", self.field, self.radius, self.points, self.precision)?;
        writeln!(f, "lhs        {}", self.lhs)?;
        writeln!(f, "rhs        {}  ({} terms)", self.rhs, self.terms)?;
        writeln!(f, "abs err    {:.3e}", self.abs_err)?;
        writeln!(f, "rel err    {:.3e}  (tol {:.1e})", self.rel_err, self.tol)?;
        writeln!(f, "time       {:.3} s", self.seconds)?;
        write!(f, "result     {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

struct Timer {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Timer {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}

fn compare<S: Real>(id: &NamedIdentity, ctx: &EvalContext, tol: f64) -> Result<EvalReport, EvalError> {
    let timer = Timer::start();
    let ctx = ctx.with_pairing(id.pairing.clone());
    let lhs = eval_lhs_in::<S>(&id.lhs, &ctx)?;
    let rhs = eval_combination_in::<S>(&id.rhs, &ctx)?;
    let abs_err = lhs.sub(&rhs).abs_f64();
    let scale = lhs.abs_f64().max(rhs.abs_f64());
    let rel_err = if scale == 0.0 { abs_err } else { abs_err / scale };
    Ok(EvalReport {
        identity: id.name.clone(),
        lhs: Value::from(&lhs),
        rhs: Value::from(&rhs),
        abs_err,
        rel_err,
        tol,
        passed: rel_err <= tol,
        terms: id.rhs.len(),
        points: ctx.truncation.len(),
        radius: ctx.truncation.radius(),
        field: ctx.field(),
        precision: ctx.precision,
        seconds: timer.seconds(),
    })
}

/// Sums both sides of `id` over the same truncation set.
pub fn verify(id: &NamedIdentity, ctx: &EvalContext, tol: f64) -> Result<EvalReport, EvalError> {
    match ctx.precision {
        Precision::Double => compare::<f64>(id, ctx, tol),
        Precision::Extended => compare::<Extended>(id, ctx, tol),
    }
}

/// [`verify`] for an identity looked up by name.
pub fn verify_named(name: &str, ctx: &EvalContext, tol: f64) -> Result<EvalReport, EvalError> {
    verify(&formulas::identity(name)?, ctx, tol)
}
