//! Named expansions built on the shuffle engine, their LaTeX and JSON forms,
//! and comparison against the hand-derived formulas in
//! `data/reference_formulas.txt`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binomial;
use crate::shuffle::{shuffle_chains, shuffle_product, Chain, Combination, RefinedTerm, ShuffleError};
use crate::symmetry::{PairingStructure, PermError, Permutation};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("unknown variant {0:?}: expected (1)(1) or (12)(1)")]
    UnknownVariant(String),
    #[error("weight {0} is out of range (need 2..=12)")]
    Weight(u32),
    #[error("invalid JSON combination: {0}")]
    Json(String),
}

const MAX_WEIGHT: u32 = 12;

fn check_weight(n: u32) -> Result<(), FormulaError> {
    if (2..=MAX_WEIGHT).contains(&n) {
        Ok(())
    } else {
        Err(FormulaError::Weight(n))
    }
}

fn single_generator_chain(g: usize, n: u32) -> Chain {
    let mut slots = vec![Some(g)];
    slots.extend(std::iter::repeat_n(None, n as usize - 1));
    Chain::labeled(&slots).expect("nonempty chain")
}

/// `ζ_K(n) = Σ 1/(α ᾱ)^n` refined by shuffling the chains of `α` and `ᾱ`.
pub fn self_shuffle_zeta_with(n: u32, simplify: bool) -> Result<Combination, FormulaError> {
    check_weight(n)?;
    let pairing = PairingStructure::standard(2)?;
    Ok(shuffle_chains(&single_generator_chain(1, n), &single_generator_chain(2, n), &pairing, simplify)?)
}

pub fn self_shuffle_zeta(n: u32) -> Result<Combination, FormulaError> {
    self_shuffle_zeta_with(n, true)
}

/// Multiplicities of `ζ(a,b)` in the shuffle product `ζ(n)ζ(n)` of ordinary
/// multiple zeta values, computed on words in `x0`, `x1`.
///
/// `ζ(n)` is the word `x0^{n-1} x1`; a depth-2 word
/// `x0^{a-1} x1 x0^{b-1} x1` is returned under the key `(b, a)`, i.e. with
/// the exponent nearest the final `x1` first, the order used for refined
/// terms.
pub fn mzv_shuffle_square(n: u32) -> BTreeMap<(u32, u32), u64> {
    fn shuffle(u: &[bool], v: &[bool], prefix: &mut Vec<bool>, out: &mut BTreeMap<Vec<bool>, u64>) {
        if u.is_empty() || v.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(u);
            w.extend_from_slice(v);
            *out.entry(w).or_default() += 1;
            return;
        }
        prefix.push(u[0]);
        shuffle(&u[1..], v, prefix, out);
        prefix.pop();
        prefix.push(v[0]);
        shuffle(u, &v[1..], prefix, out);
        prefix.pop();
    }
    // true = x1
    let mut word = vec![false; n as usize - 1];
    word.push(true);
    let mut words = BTreeMap::new();
    shuffle(&word, &word, &mut Vec::new(), &mut words);
    let mut out = BTreeMap::new();
    for (w, c) in words {
        let first = w.iter().position(|&x| x).unwrap() as u32 + 1;
        let second = w.len() as u32 - first;
        *out.entry((second, first)).or_default() += c;
    }
    out
}

/// The two-variable MDZVs of weight 3 whose self-shuffles are worked out by
/// hand: `Σ 1/(N(α)N(α+β)²)` and `Σ 1/(ᾱβN(α+β)²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MdzvVariant {
    /// `ζ^{(1)(1)}(1,2)`
    Separated,
    /// `ζ^{(12)(1)}(1,2)`
    Crossed,
}

impl MdzvVariant {
    pub const ALL: [MdzvVariant; 2] = [MdzvVariant::Separated, MdzvVariant::Crossed];

    /// Generators are numbered `α₁, β₁, α₂, β₂ = 1, 2, 3, 4`; the first
    /// chain carries the first embedding, the second chain its conjugate.
    pub fn chains(self) -> (Chain, Chain) {
        let first = match self {
            MdzvVariant::Separated => [Some(1), Some(2), None],
            MdzvVariant::Crossed => [Some(2), Some(1), None],
        };
        (Chain::labeled(&first).unwrap(), Chain::labeled(&[Some(3), Some(4), None]).unwrap())
    }

    /// Variables `α` (generators 1, 3) and `β` (generators 2, 4).
    pub fn pairing() -> PairingStructure {
        PairingStructure::new(&[(1, 3), (2, 4)]).expect("valid pairing")
    }

    pub fn name(self) -> &'static str {
        match self {
            MdzvVariant::Separated => "(1)(1)",
            MdzvVariant::Crossed => "(12)(1)",
        }
    }

    fn identity_name(self) -> &'static str {
        match self {
            MdzvVariant::Separated => "selfie-mdzv-1-1",
            MdzvVariant::Crossed => "selfie-mdzv-12-1",
        }
    }
}

impl fmt::Display for MdzvVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MdzvVariant {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, FormulaError> {
        match s.trim() {
            "(1)(1)" | "1-1" => Ok(MdzvVariant::Separated),
            "(12)(1)" | "12-1" => Ok(MdzvVariant::Crossed),
            other => Err(FormulaError::UnknownVariant(other.to_string())),
        }
    }
}

pub fn self_shuffle_mdzv(variant: MdzvVariant, simplify: bool) -> Result<Combination, FormulaError> {
    let (a, b) = variant.chains();
    Ok(shuffle_chains(&a, &b, &MdzvVariant::pairing(), simplify)?)
}

/// `ζ^{(1)(1)}(1,2) − ζ^{(12)(1)}(1,2)` as simplified combinations.
pub fn corollary_difference() -> Result<Combination, FormulaError> {
    let a = self_shuffle_mdzv(MdzvVariant::Separated, true)?;
    let b = self_shuffle_mdzv(MdzvVariant::Crossed, true)?;
    Ok(a.checked_sub(&b)?)
}

/// Simplified shuffle product of two depth-one refined terms, the right
/// factor becoming generators 3 and 4.
pub fn refined_product(a: &RefinedTerm, b: &RefinedTerm) -> Result<Combination, FormulaError> {
    Ok(shuffle_product(a, b, &PairingStructure::standard(4)?, true)?)
}

/// `ζ_K(n1)·ζ_K(n2)`: both factors refined, then every pair of refined terms
/// shuffled and the results collected modulo the symmetry group.
pub fn product_zeta(n1: u32, n2: u32) -> Result<Combination, FormulaError> {
    let left = self_shuffle_zeta(n1)?;
    let right = self_shuffle_zeta(n2)?;
    let mut out = Combination::new();
    for (a, ca) in left.iter() {
        for (b, cb) in right.iter() {
            let factor = ca.checked_mul(cb).ok_or(ShuffleError::Overflow)?;
            out = out.checked_add_scaled(&refined_product(a, b)?, factor)?;
        }
    }
    Ok(out)
}

/// `C(2n1,n1)·C(2n2,n2)·C(2n1+2n2,2n1)`.
pub fn product_zeta_count(n1: u32, n2: u32) -> u128 {
    let (n1, n2) = (n1 as u64, n2 as u64);
    binomial(2 * n1, n1) * binomial(2 * n2, n2) * binomial(2 * n1 + 2 * n2, 2 * n1)
}

/// What the left-hand side of an identity sums.
#[derive(Clone, Debug, PartialEq)]
pub enum Lhs {
    /// `Σ 1/N(α)^n`
    DedekindZeta(u32),
    Mdzv(MdzvVariant),
    /// `ζ^{(1)(1)}(1,2) − ζ^{(12)(1)}(1,2)`
    MdzvDifference,
    /// Product of two depth-one refined sums.
    TermProduct(RefinedTerm, RefinedTerm),
    /// `ζ_K(n1)·ζ_K(n2)`
    ZetaProduct(u32, u32),
    /// A single refined term, evaluated directly.
    Term(RefinedTerm),
}

impl fmt::Display for Lhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lhs::DedekindZeta(n) => write!(f, "ζ_K({n})"),
            Lhs::Mdzv(v) => write!(f, "ζ^{v}(1,2)"),
            Lhs::MdzvDifference => f.write_str("ζ^(1)(1)(1,2) - ζ^(12)(1)(1,2)"),
            Lhs::TermProduct(a, b) => write!(f, "{a} · {b}"),
            Lhs::ZetaProduct(a, b) => write!(f, "ζ_K({a}) · ζ_K({b})"),
            Lhs::Term(t) => write!(f, "{t}"),
        }
    }
}

/// An identity `lhs = rhs` with the engine's right-hand side.
#[derive(Clone, Debug)]
pub struct NamedIdentity {
    pub name: String,
    pub lhs: Lhs,
    pub pairing: PairingStructure,
    pub rhs: Combination,
}

/// Names accepted by [`identity`] besides the parametric `selfie-zeta<n>`,
/// `zeta<a>-x-zeta<b>`, `shuffle-<ab>x<cd>` and `coset:<ρ>:<h>:<exps>`.
pub fn catalog_names() -> Vec<String> {
    let mut names: Vec<String> = vec!["selfie-zeta2".into(), "selfie-zeta3".into()];
    names.extend(MdzvVariant::ALL.iter().map(|v| v.identity_name().to_string()));
    names.push("corollary".into());
    names.extend(refined_product_names());
    names.push("zeta2-x-zeta2".into());
    names.push("zeta2-x-zeta3".into());
    names
}

/// The refined products needed for `ζ_K(2)ζ_K(2)` and `ζ_K(2)ζ_K(3)`.
pub fn refined_product_names() -> Vec<String> {
    ["22x22", "22x13", "13x13", "22x33", "22x24", "22x15", "13x33", "13x24", "13x15"]
        .iter()
        .map(|p| format!("shuffle-{p}"))
        .collect()
}

fn parse_suffix_u32(s: &str) -> Option<u32> {
    s.parse::<u32>().ok()
}

fn depth_one(digits: &str) -> Option<RefinedTerm> {
    let exps: Vec<u32> = digits.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?;
    if exps.len() != 2 {
        return None;
    }
    RefinedTerm::identity(exps).ok()
}

pub fn identity(name: &str) -> Result<NamedIdentity, FormulaError> {
    let unknown = || FormulaError::UnknownIdentity(name.to_string());
    let std2 = PairingStructure::standard(2)?;
    let std4 = PairingStructure::standard(4)?;
    let make = |lhs, pairing, rhs| NamedIdentity { name: name.to_string(), lhs, pairing, rhs };

    if let Some(n) = name.strip_prefix("selfie-zeta").and_then(parse_suffix_u32) {
        return Ok(make(Lhs::DedekindZeta(n), std2, self_shuffle_zeta(n)?));
    }
    for v in MdzvVariant::ALL {
        if name == v.identity_name() {
            return Ok(make(Lhs::Mdzv(v), MdzvVariant::pairing(), self_shuffle_mdzv(v, true)?));
        }
    }
    if name == "corollary" {
        return Ok(make(Lhs::MdzvDifference, MdzvVariant::pairing(), corollary_difference()?));
    }
    if let Some(rest) = name.strip_prefix("shuffle-") {
        let (l, r) = rest.split_once('x').ok_or_else(unknown)?;
        let (a, b) = (depth_one(l).ok_or_else(unknown)?, depth_one(r).ok_or_else(unknown)?);
        let rhs = refined_product(&a, &b)?;
        return Ok(make(Lhs::TermProduct(a, b), std4, rhs));
    }
    if let Some(rest) = name.strip_prefix("zeta") {
        let (l, r) = rest.split_once("-x-zeta").ok_or_else(unknown)?;
        let (n1, n2) = (parse_suffix_u32(l).ok_or_else(unknown)?, parse_suffix_u32(r).ok_or_else(unknown)?);
        return Ok(make(Lhs::ZetaProduct(n1, n2), std4, product_zeta(n1, n2)?));
    }
    if let Some(rest) = name.strip_prefix("coset:") {
        // coset:<ρ>:<h>:<exponents>  checks ζ^{ρh} = ζ^ρ
        let mut parts = rest.splitn(3, ':');
        let (rho, h, exps) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(unknown()),
        };
        let base: RefinedTerm = format!("{rho}:{exps}").parse()?;
        let h = Permutation::parse(h, base.k())?;
        let pairing = PairingStructure::standard(base.k())?;
        if !pairing.contains(&h) {
            return Err(FormulaError::UnknownIdentity(format!("{name}: {h} is not in the symmetry group")));
        }
        let moved = RefinedTerm::new(base.order() * &h, base.exponents().to_vec())?;
        return Ok(make(Lhs::Term(moved), pairing, Combination::single(base, 1)));
    }
    Err(unknown())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Notation {
    /// `ζ^ρ(a,b,c,d)`
    #[default]
    Comma,
    /// `ζ^ρ(a,b;c,d)`
    Semicolon,
}

impl FromStr for Notation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "comma" => Ok(Notation::Comma),
            "semicolon" => Ok(Notation::Semicolon),
            other => Err(format!("unknown notation {other:?}: expected comma or semicolon")),
        }
    }
}

pub fn term_to_latex(t: &RefinedTerm, notation: Notation) -> String {
    let mut out = format!("\\zeta^{{{}}}(", t.order());
    let half = t.k() / 2;
    for (i, e) in t.exponents().iter().enumerate() {
        if i > 0 {
            out.push(if notation == Notation::Semicolon && t.k() >= 4 && i == half { ';' } else { ',' });
        }
        out.push_str(&e.to_string());
    }
    out.push(')');
    out
}

/// `2\zeta^{(1)}(2,2)+4\zeta^{(1)}(1,3)`; unit coefficients are omitted and
/// the empty combination is `0`.
pub fn to_latex(c: &Combination, notation: Notation) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (t, coeff)) in c.iter().enumerate() {
        if coeff < 0 {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        if coeff.unsigned_abs() != 1 {
            out.push_str(&coeff.unsigned_abs().to_string());
        }
        out.push_str(&term_to_latex(t, notation));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonCombination {
    k: usize,
    pairing: Vec<[usize; 2]>,
    terms: Vec<JsonTerm>,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    perm: String,
    exponents: Vec<u32>,
    coeff: i64,
}

pub fn to_json(c: &Combination, pairing: &PairingStructure) -> String {
    let doc = JsonCombination {
        k: pairing.k(),
        pairing: pairing.pairs().iter().map(|&(a, b)| [a, b]).collect(),
        terms: c
            .iter()
            .map(|(t, coeff)| JsonTerm { perm: t.order().to_string(), exponents: t.exponents().to_vec(), coeff })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn from_json(text: &str) -> Result<(Combination, PairingStructure), FormulaError> {
    let doc: JsonCombination = serde_json::from_str(text).map_err(|e| FormulaError::Json(e.to_string()))?;
    let pairs: Vec<(usize, usize)> = doc.pairing.iter().map(|p| (p[0], p[1])).collect();
    let pairing = PairingStructure::new(&pairs)?;
    if pairing.k() != doc.k {
        return Err(FormulaError::Json(format!("k = {} but the pairing covers {}", doc.k, pairing.k())));
    }
    let mut c = Combination::new();
    for t in doc.terms {
        if t.exponents.len() != doc.k {
            return Err(FormulaError::Json(format!("term {} has {} exponents, k = {}", t.perm, t.exponents.len(), doc.k)));
        }
        let term = RefinedTerm::new(Permutation::parse(&t.perm, doc.k)?, t.exponents)?;
        c.add_term(term, t.coeff)?;
    }
    Ok((c, pairing))
}

/// A hand-written formula read back into a combination.
#[derive(Clone, Debug, Default)]
pub struct ParsedFormula {
    pub combination: Combination,
    /// Entries that do not describe a valid term of the expected shape.
    pub malformed: Vec<String>,
    /// Terms written more than once; their coefficients are added.
    pub repeated: Vec<RefinedTerm>,
}

fn zeta_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"([+-])?\s*(\d+)?\s*\\zeta(?:\^\{([^}]*)\}|\^(\d))?\s*\(([^)]*)\)").expect("valid regex")
    })
}

/// Reads every `c\zeta^{ρ}(e,…)` after the last `=` of each line.
///
/// Tolerates the shapes found in hand-typeset formulas: `\zeta^{1}` for the
/// identity, unbalanced parentheses such as `\zeta^{23)}`, `;` or `,` between
/// exponents, and LaTeX alignment markup.
pub fn parse_latex(text: &str, k: usize) -> ParsedFormula {
    let rhs: Vec<&str> = text.lines().map(|l| l.rsplit_once('=').map_or(l, |(_, r)| r)).collect();
    let joined = rhs.join(" ");
    let mut out = ParsedFormula::default();
    let mut seen = std::collections::BTreeSet::new();
    for cap in zeta_regex().captures_iter(&joined) {
        let whole = cap.get(0).unwrap().as_str().trim().to_string();
        let sign: i64 = if cap.get(1).map(|m| m.as_str()) == Some("-") { -1 } else { 1 };
        let coeff: i64 = cap.get(2).map_or(1, |m| m.as_str().parse().unwrap_or(0));
        let perm_text = cap.get(3).or(cap.get(4)).map_or("1", |m| m.as_str()).trim();
        let mut perm_text = perm_text.to_string();
        if !perm_text.starts_with('(') {
            perm_text.insert(0, '(');
        }
        if !perm_text.ends_with(')') {
            perm_text.push(')');
        }
        let exps: Option<Vec<u32>> =
            cap[5].split([',', ';']).map(|e| e.trim().parse::<u32>().ok().filter(|&e| e > 0)).collect();
        let term = match exps {
            Some(exps) if exps.len() == k => {
                Permutation::parse(&perm_text, k).ok().and_then(|p| RefinedTerm::new(p, exps).ok())
            }
            _ => None,
        };
        match term {
            Some(term) => {
                if !seen.insert(term.clone()) {
                    out.repeated.push(term.clone());
                }
                out.combination.add_term(term, sign * coeff).expect("small printed coefficients");
            }
            None => out.malformed.push(whole),
        }
    }
    out
}

const REFERENCE: &str = include_str!("../data/reference_formulas.txt");

/// Form of a printed formula: as shuffled, or after collecting cosets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Form {
    Raw,
    Simplified,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Raw => "raw",
            Form::Simplified => "simplified",
        })
    }
}

/// Verbatim text of the transcribed formula, if there is one.
pub fn printed_text(name: &str, form: Form) -> Option<String> {
    let header = format!("@ {name} {form}");
    let mut lines = REFERENCE.lines().skip_while(|l| l.trim() != header);
    lines.next()?;
    let body: Vec<&str> = lines.take_while(|l| !l.starts_with("@ ")).collect();
    Some(body.join("\n").trim().to_string())
}

/// Engine expansion of an identity in the given form.
pub fn computed_form(id: &NamedIdentity, form: Form) -> Result<Combination, FormulaError> {
    match (form, &id.lhs) {
        (Form::Simplified, _) => Ok(id.rhs.clone()),
        (Form::Raw, Lhs::DedekindZeta(n)) => self_shuffle_zeta_with(*n, false),
        (Form::Raw, Lhs::Mdzv(v)) => self_shuffle_mdzv(*v, false),
        (Form::Raw, Lhs::TermProduct(a, b)) => Ok(shuffle_product(a, b, &id.pairing, false)?),
        (Form::Raw, _) => Err(FormulaError::UnknownIdentity(format!("{}: no raw form", id.name))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub term: RefinedTerm,
    pub computed: i64,
    pub printed: i64,
}

/// Term-by-term comparison of a computed and a printed combination.
#[derive(Clone, Debug, Default)]
pub struct DiffReport {
    pub mismatched: Vec<Mismatch>,
    pub only_computed: Vec<(RefinedTerm, i64)>,
    pub only_printed: Vec<(RefinedTerm, i64)>,
    /// Printed terms rewritten to their coset representative before comparing.
    pub aliases: Vec<(RefinedTerm, RefinedTerm)>,
    pub malformed: Vec<String>,
    pub repeated: Vec<RefinedTerm>,
}

impl DiffReport {
    /// No coefficient disagreements and nothing one-sided. Malformed or
    /// repeated printed entries are reported but do not count.
    pub fn is_clean(&self) -> bool {
        self.mismatched.is_empty() && self.only_computed.is_empty() && self.only_printed.is_empty()
    }
}

/// Compares `computed` with `printed`. With a pairing, printed terms are first
/// reduced to coset representatives, so both sides use the same names.
pub fn paper_reference_diff(
    computed: &Combination,
    printed: &ParsedFormula,
    pairing: Option<&PairingStructure>,
) -> Result<DiffReport, FormulaError> {
    let mut report =
        DiffReport { malformed: printed.malformed.clone(), repeated: printed.repeated.clone(), ..Default::default() };
    let mut reference = Combination::new();
    for (t, c) in printed.combination.iter() {
        let canon = match pairing {
            Some(p) => p.canonicalize(t),
            None => t.clone(),
        };
        if &canon != t {
            report.aliases.push((t.clone(), canon.clone()));
        }
        reference.add_term(canon, c)?;
    }
    for (t, c) in computed.iter() {
        match reference.coefficient(t) {
            0 => report.only_computed.push((t.clone(), c)),
            p if p != c => report.mismatched.push(Mismatch { term: t.clone(), computed: c, printed: p }),
            _ => {}
        }
    }
    for (t, p) in reference.iter() {
        if computed.coefficient(t) == 0 {
            report.only_printed.push((t.clone(), p));
        }
    }
    Ok(report)
}

/// Diffs every transcribed form of a named identity.
pub fn diff_identity(name: &str) -> Result<Vec<(Form, DiffReport)>, FormulaError> {
    let id = identity(name)?;
    let mut out = Vec::new();
    for form in [Form::Raw, Form::Simplified] {
        let Some(text) = printed_text(name, form) else { continue };
        let printed = parse_latex(&text, id.pairing.k());
        let computed = computed_form(&id, form)?;
        let pairing = (form == Form::Simplified).then_some(&id.pairing);
        out.push((form, paper_reference_diff(&computed, &printed, pairing)?));
    }
    if out.is_empty() {
        return Err(FormulaError::UnknownIdentity(format!("{name}: no transcribed formula")));
    }
    Ok(out)
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            writeln!(f, "  all coefficients agree")?;
        }
        for m in &self.mismatched {
            writeln!(f, "  mismatch     {:<24} computed {:>6}  printed {:>6}", m.term.to_string(), m.computed, m.printed)?;
        }
        for (t, c) in &self.only_computed {
            writeln!(f, "  computed only {:<23} {:>6}", t.to_string(), c)?;
        }
        for (t, c) in &self.only_printed {
            writeln!(f, "  printed only {:<24} {:>6}", t.to_string(), c)?;
        }
        for (from, to) in &self.aliases {
            writeln!(f, "  alias        {from} -> {to}")?;
        }
        for m in &self.malformed {
            writeln!(f, "  malformed    {m}")?;
        }
        for t in &self.repeated {
            writeln!(f, "  repeated     {t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(s: &str) -> RefinedTerm {
        s.parse().unwrap()
    }

    #[test]
    fn selfie_latex_forms() {
        assert_eq!(to_latex(&self_shuffle_zeta(2).unwrap(), Notation::Comma), "2\\zeta^{(1)}(2,2)+4\\zeta^{(1)}(1,3)");
        assert_eq!(
            to_latex(&self_shuffle_zeta(3).unwrap(), Notation::Comma),
            "2\\zeta^{(1)}(3,3)+6\\zeta^{(1)}(2,4)+12\\zeta^{(1)}(1,5)"
        );
        assert_eq!(to_latex(&Combination::new(), Notation::Comma), "0");
        let c = Combination::single(term("(23):1,1,2,2"), -1);
        assert_eq!(to_latex(&c, Notation::Semicolon), "-\\zeta^{(23)}(1,1;2,2)");
    }

    #[test]
    fn raw_selfie_of_zeta2() {
        let raw = self_shuffle_zeta_with(2, false).unwrap();
        assert_eq!(raw.coefficient(&term("(1):2,2")), 1);
        assert_eq!(raw.coefficient(&term("(1):1,3")), 2);
        assert_eq!(raw.coefficient(&term("(12):1,3")), 2);
        assert_eq!(raw.coefficient(&term("(12):2,2")), 1);
    }

    #[test]
    fn selfie_sums_are_central_binomials() {
        for n in 2..=7 {
            assert_eq!(self_shuffle_zeta(n).unwrap().coefficient_sum(), binomial(2 * n as u64, n as u64) as i128);
        }
        assert!(self_shuffle_zeta(1).is_err());
    }

    #[test]
    fn mzv_word_shuffle() {
        let sq = mzv_shuffle_square(2);
        assert_eq!(sq, BTreeMap::from([((2, 2), 2), ((1, 3), 4)]));
        let sq = mzv_shuffle_square(3);
        assert_eq!(sq, BTreeMap::from([((3, 3), 2), ((2, 4), 6), ((1, 5), 12)]));
    }

    #[test]
    fn mdzv_selfies() {
        for v in MdzvVariant::ALL {
            assert_eq!(self_shuffle_mdzv(v, false).unwrap().coefficient_sum(), 20);
            assert_eq!(self_shuffle_mdzv(v, true).unwrap().coefficient_sum(), 20);
        }
        let sep = self_shuffle_mdzv(MdzvVariant::Separated, true).unwrap();
        assert_eq!(sep.coefficient(&term("(1):1,2,1,2")), 2);
        assert_eq!(sep.coefficient(&term("(1):1,1,2,2")), 2);
        assert_eq!(sep.coefficient(&term("(23):1,1,2,2")), 4);
        assert_eq!(sep.coefficient(&term("(1):1,1,1,3")), 4);
        assert_eq!(sep.coefficient(&term("(23):1,1,1,3")), 8);
        assert_eq!(sep.len(), 5);

        let raw = self_shuffle_mdzv(MdzvVariant::Crossed, false).unwrap();
        assert_eq!(raw.coefficient(&term("(12):1,2,1,2")), 1);
        assert_eq!(raw.coefficient(&term("(1234):1,1,2,2")), 1);
        assert_eq!(raw.coefficient(&term("(1324):1,2,1,2")), 1);
        let crossed = self_shuffle_mdzv(MdzvVariant::Crossed, true).unwrap();
        // α ↔ β exchange maps β, α, ᾱ, β̄ to α, β, β̄, ᾱ: the class of (12) is (34), not (1)
        assert_eq!(crossed.coefficient(&term("(34):1,2,1,2")), 2);
        assert_eq!(crossed.coefficient(&term("(1):1,2,1,2")), 0);
        assert_eq!(crossed.coefficient(&term("(1):1,1,2,2")), 2);
        assert_eq!(crossed.coefficient(&term("(34):1,1,2,2")), 4);
        assert_eq!(crossed.coefficient(&term("(1):1,1,1,3")), 4);
        assert_eq!(crossed.coefficient(&term("(34):1,1,1,3")), 8);
        assert_eq!(crossed.len(), 5);
        assert_eq!(MdzvVariant::pairing().canonicalize(&term("(1234):1,1,2,2")), term("(1):1,1,2,2"));
    }

    #[test]
    fn corollary_difference_terms() {
        let d = corollary_difference().unwrap();
        assert_eq!(d.coefficient_sum(), 0);
        assert_eq!(d.coefficient(&term("(1):1,2,1,2")), 2);
        assert_eq!(d.coefficient(&term("(34):1,2,1,2")), -2);
        assert_eq!(d.coefficient(&term("(23):1,1,2,2")), 4);
        assert_eq!(d.coefficient(&term("(34):1,1,2,2")), -4);
        assert_eq!(d.coefficient(&term("(23):1,1,1,3")), 8);
        assert_eq!(d.coefficient(&term("(34):1,1,1,3")), -8);
        assert_eq!(d.len(), 6);
        let same = self_shuffle_mdzv(MdzvVariant::Crossed, true).unwrap();
        assert!(same.checked_sub(&same).unwrap().is_empty());
    }

    #[test]
    fn product_counts_and_coefficients() {
        let p22 = product_zeta(2, 2).unwrap();
        assert_eq!(p22.coefficient_sum(), 2520);
        assert_eq!(product_zeta_count(2, 2), 2520);
        assert_eq!(p22.coefficient(&term("(1):2,2,2,2")), 8);
        let p23 = product_zeta(2, 3).unwrap();
        assert_eq!(p23.coefficient_sum(), 25200);
        assert_eq!(product_zeta_count(2, 3), 25200);
        // the printed 2880 is the sum over both cosets (23)H and (234)H
        assert_eq!(p23.coefficient(&term("(23):1,1,1,7")), 1440);
        assert_eq!(p23.coefficient(&term("(234):1,1,1,7")), 1440);
        assert_eq!(
            p23.coefficient(&term("(23):1,1,1,7")) + p23.coefficient(&term("(234):1,1,1,7")),
            2880
        );
        let p = refined_product(&term("(1):1,3"), &term("(1):1,5")).unwrap();
        assert_eq!(p.coefficient(&term("(1):1,1,1,7")), 30);
    }

    #[test]
    fn identity_lookup() {
        for name in catalog_names() {
            let id = identity(&name).unwrap();
            assert!(!id.rhs.is_empty(), "{name}");
        }
        assert_eq!(refined_product_names().len(), 9);
        assert!(matches!(identity("nope"), Err(FormulaError::UnknownIdentity(_))));
        assert!(matches!(identity("shuffle-2x13"), Err(FormulaError::UnknownIdentity(_))));
        let id = identity("coset:(132):(1324):1,3,1,3").unwrap();
        assert_eq!(id.lhs, Lhs::Term(term("(1234):1,3,1,3")));
        assert!(identity("coset:(132):(123):1,3,1,3").is_err());
    }

    #[test]
    fn json_round_trip() {
        let pairing = PairingStructure::standard(4).unwrap();
        let c = product_zeta(2, 2).unwrap();
        let text = to_json(&c, &pairing);
        assert!(text.starts_with("{\"k\":4,\"pairing\":[[1,2],[3,4]],\"terms\":[{\"perm\":\"(1)\""));
        let (back, p) = from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(p, pairing);
        assert!(from_json("{\"k\":2,\"pairing\":[[1,2]],\"terms\":[{\"perm\":\"(1)\",\"exponents\":[1],\"coeff\":1}]}").is_err());
    }

    #[test]
    fn latex_parsing_tolerates_typesetting() {
        let p = parse_latex("\\[\\zeta_{K,C}(2)=2\\zeta^{(1)}(2,2)+4\\zeta^{(1)}(1,3).\\]", 2);
        assert_eq!(p.combination, self_shuffle_zeta(2).unwrap());
        let p = parse_latex("& + & 3\\zeta^{1}(1,4;14) + 5\\zeta^{23)}(1,1;2,6) - \\zeta^{(1234)}(1,1;2,2)\\\\", 4);
        assert_eq!(p.malformed, vec!["3\\zeta^{1}(1,4;14)".to_string()]);
        assert_eq!(p.combination.coefficient(&term("(23):1,1,2,6")), 5);
        assert_eq!(p.combination.coefficient(&term("(1234):1,1,2,2")), -1);
        let p = parse_latex("\\zeta^{(1)}(1,3)+\\zeta^{(1)}(1,3)", 2);
        assert_eq!(p.repeated, vec![term("(1):1,3")]);
        assert_eq!(p.combination.coefficient(&term("(1):1,3")), 2);
    }

    #[test]
    fn printed_selfies_match_exactly() {
        for name in ["selfie-zeta2", "selfie-zeta3"] {
            for (form, report) in diff_identity(name).unwrap() {
                assert!(report.is_clean(), "{name} {form}:\n{report}");
            }
        }
        let c = self_shuffle_zeta(2).unwrap();
        let p = ParsedFormula { combination: c.clone(), ..Default::default() };
        assert!(paper_reference_diff(&c, &p, None).unwrap().is_clean());
    }

    #[test]
    fn every_transcription_is_present() {
        for name in catalog_names() {
            assert!(printed_text(&name, Form::Simplified).is_some(), "{name}");
            assert!(diff_identity(&name).is_ok(), "{name}");
        }
    }
}
