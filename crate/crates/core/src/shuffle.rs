//! Shuffles of ordered integration chains and their refined-MDZV terms.
//!
//! A chain is a strictly decreasing list of integration variables
//! `t₁ > t₂ > … > 0`; some variables carry a frequency (a [`Generator`]).
//! Integrating `exp(-Σ α_g t_g)` from the top variable down contributes, for
//! every slot, one reciprocal factor equal to the sum of all frequencies at or
//! above that slot. Grouping equal factors gives a refined term
//! `ζ^ρ(e₁,…,e_k)`: `ρ` is the order in which generators first appear and
//! `e_j` counts the slots from the `j`-th generator down to the next one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::symmetry::{next_permutation, PairingStructure, PermError, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShuffleError {
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("generator {0} occurs in both chains")]
    Overlap(usize),
    #[error("mixed weights in one combination: expected {expected}, found {found}")]
    MixedWeight { expected: u32, found: u32 },
    #[error("term has k = {term} but the pairing has k = {pairing}")]
    PairingMismatch { term: usize, pairing: usize },
    #[error("coefficient overflow")]
    Overflow,
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A frequency label `α_i`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(u8);

impl Generator {
    pub fn new(index: usize) -> Self {
        assert!((1..=u8::MAX as usize).contains(&index), "generator index {index} out of range");
        Self(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Which of the two shuffled chains a slot came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Left,
    Right,
}

/// Ordered integration variables, top (largest) first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    slots: Vec<Option<Generator>>,
}

impl Chain {
    pub fn new(slots: Vec<Option<Generator>>) -> Result<Self, ShuffleError> {
        if slots.is_empty() {
            return Err(ShuffleError::MalformedWord("a chain needs at least one slot".into()));
        }
        Ok(Self { slots })
    }

    /// Shorthand: `Chain::labeled(&[Some(1), None, Some(2), None])`.
    pub fn labeled(slots: &[Option<usize>]) -> Result<Self, ShuffleError> {
        Self::new(slots.iter().map(|s| s.map(Generator::new)).collect())
    }

    /// The chain whose integral is the refined term, with every generator
    /// index shifted by `shift`.
    pub fn from_term(term: &RefinedTerm, shift: usize) -> Self {
        let mut slots = Vec::with_capacity(term.weight() as usize);
        for (j, &e) in term.exponents().iter().enumerate() {
            slots.push(Some(Generator::new(term.order().apply(j + 1) + shift)));
            slots.extend(std::iter::repeat_n(None, e as usize - 1));
        }
        Self { slots }
    }

    pub fn slots(&self) -> &[Option<Generator>] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.slots.iter().flatten().copied()
    }
}

/// A single chain obtained by interleaving two chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleWord {
    slots: Vec<(Origin, Option<Generator>)>,
}

impl ShuffleWord {
    pub fn from_slots(slots: Vec<(Origin, Option<Generator>)>) -> Self {
        Self { slots }
    }

    /// Lays out `left` and `right` along `pattern`.
    pub fn interleave(left: &Chain, right: &Chain, pattern: &[Origin]) -> Result<Self, ShuffleError> {
        let lefts = pattern.iter().filter(|&&o| o == Origin::Left).count();
        if lefts != left.len() || pattern.len() - lefts != right.len() {
            return Err(ShuffleError::MalformedWord(format!(
                "pattern with {lefts}+{} slots does not fit chains of length {} and {}",
                pattern.len() - lefts,
                left.len(),
                right.len()
            )));
        }
        let (mut l, mut r) = (left.slots.iter(), right.slots.iter());
        let slots = pattern
            .iter()
            .map(|&o| match o {
                Origin::Left => (o, *l.next().unwrap()),
                Origin::Right => (o, *r.next().unwrap()),
            })
            .collect();
        Ok(Self { slots })
    }

    pub fn slots(&self) -> &[(Origin, Option<Generator>)] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The slots that came from one chain, in word order.
    pub fn restrict(&self, origin: Origin) -> Vec<Option<Generator>> {
        self.slots.iter().filter(|(o, _)| *o == origin).map(|(_, g)| *g).collect()
    }
}

/// Iterator over all interleavings of an `m`-chain with an `n`-chain, as
/// origin patterns in lexicographic order (`Left < Right`).
///
/// The first pattern places the whole left chain on top; `C(m+n, m)` patterns
/// are produced in total.
#[derive(Clone, Debug)]
pub struct Interleavings {
    next: Option<Vec<Origin>>,
}

pub fn enumerate_shuffles(m: usize, n: usize) -> Interleavings {
    let mut first = vec![Origin::Left; m];
    first.extend(std::iter::repeat_n(Origin::Right, n));
    Interleavings { next: Some(first) }
}

impl Iterator for Interleavings {
    type Item = Vec<Origin>;

    fn next(&mut self) -> Option<Vec<Origin>> {
        let current = self.next.take()?;
        let mut following = current.clone();
        if next_permutation(&mut following) {
            self.next = Some(following);
        }
        Some(current)
    }
}

/// A refined MDZV `ζ^ρ(e₁,…,e_k)`.
///
/// The value is `Σ Π_j 1/(α_{ρ(1)} + … + α_{ρ(j)})^{e_j}` over the cone
/// variables; the last factor is always the sum of all `k` generators.
/// Terms sort by permutation, then by exponents in decreasing order, so
/// `ζ^{(1)}(2,2)` precedes `ζ^{(1)}(1,3)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RefinedTerm {
    order: Permutation,
    exponents: Vec<u32>,
}

impl RefinedTerm {
    pub fn new(order: Permutation, exponents: Vec<u32>) -> Result<Self, ShuffleError> {
        if order.degree() != exponents.len() {
            return Err(ShuffleError::InvalidTerm(format!(
                "permutation of degree {} with {} exponents",
                order.degree(),
                exponents.len()
            )));
        }
        if exponents.contains(&0) {
            return Err(ShuffleError::InvalidTerm(format!("exponents must be positive: {exponents:?}")));
        }
        Ok(Self { order, exponents })
    }

    pub(crate) fn from_parts(order: Permutation, exponents: Vec<u32>) -> Self {
        debug_assert_eq!(order.degree(), exponents.len());
        Self { order, exponents }
    }

    /// `ζ^{(1)}(e₁,…,e_k)`.
    pub fn identity(exponents: Vec<u32>) -> Result<Self, ShuffleError> {
        Self::new(Permutation::identity(exponents.len()), exponents)
    }

    pub fn order(&self) -> &Permutation {
        &self.order
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    pub fn weight(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

impl Ord for RefinedTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&other.order).then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for RefinedTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RefinedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ζ^{}(", self.order)?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for RefinedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RefinedTerm {
    type Err = ShuffleError;

    /// `"<perm>:<e1>,<e2>[,<e3>,<e4>]"`, e.g. `"(23):1,2,1,4"`.
    fn from_str(s: &str) -> Result<Self, ShuffleError> {
        let (perm, exps) = s
            .split_once(':')
            .ok_or_else(|| ShuffleError::InvalidTerm(format!("{s:?}: expected <perm>:<exponents>")))?;
        let exponents = exps
            .split(',')
            .map(|e| e.parse::<u32>().map_err(|_| ShuffleError::InvalidTerm(format!("{s:?}: bad exponent {e:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let order = Permutation::parse(perm, exponents.len())?;
        Self::new(order, exponents)
    }
}

/// Reads off the refined term of an interleaved chain.
pub fn term_from_word(word: &ShuffleWord) -> Result<RefinedTerm, ShuffleError> {
    term_from_slots(word.slots.iter().map(|(_, g)| *g))
}

pub(crate) fn term_from_slots(slots: impl IntoIterator<Item = Option<Generator>>) -> Result<RefinedTerm, ShuffleError> {
    let mut order = Vec::new();
    let mut exponents: Vec<u32> = Vec::new();
    for slot in slots {
        match slot {
            Some(g) => {
                order.push(g.index());
                exponents.push(1);
            }
            None => match exponents.last_mut() {
                Some(e) => *e += 1,
                None => return Err(ShuffleError::MalformedWord("top slot carries no generator".into())),
            },
        }
    }
    if order.is_empty() {
        return Err(ShuffleError::MalformedWord("empty word".into()));
    }
    let order = Permutation::from_one_line(&order)
        .map_err(|_| ShuffleError::MalformedWord(format!("generators {order:?} are not exactly 1..{}", order.len())))?;
    Ok(RefinedTerm { order, exponents })
}

/// Integer linear combination of refined terms. Zero coefficients are never
/// stored; iteration follows the [`RefinedTerm`] order.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Combination {
    terms: BTreeMap<RefinedTerm, i64>,
}

impl Combination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(term: RefinedTerm, coeff: i64) -> Self {
        let mut c = Self::new();
        c.add_term(term, coeff).expect("single term cannot overflow");
        c
    }

    pub fn add_term(&mut self, term: RefinedTerm, coeff: i64) -> Result<(), ShuffleError> {
        if coeff == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(term);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().checked_add(coeff).ok_or(ShuffleError::Overflow)?;
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, term: &RefinedTerm) -> i64 {
        self.terms.get(term).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RefinedTerm, i64)> {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `k` shared by the terms, if any.
    pub fn k(&self) -> Option<usize> {
        self.terms.keys().next().map(RefinedTerm::k)
    }

    pub fn coefficient_sum(&self) -> i128 {
        self.terms.values().map(|&c| c as i128).sum()
    }

    pub fn checked_scale(&self, factor: i64) -> Result<Self, ShuffleError> {
        let mut out = Self::new();
        for (t, c) in self.iter() {
            out.add_term(t.clone(), c.checked_mul(factor).ok_or(ShuffleError::Overflow)?)?;
        }
        Ok(out)
    }

    /// `self + factor · other`.
    pub fn checked_add_scaled(&self, other: &Self, factor: i64) -> Result<Self, ShuffleError> {
        let mut out = self.clone();
        for (t, c) in other.iter() {
            out.add_term(t.clone(), c.checked_mul(factor).ok_or(ShuffleError::Overflow)?)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ShuffleError> {
        self.checked_add_scaled(other, -1)
    }

    /// Re-collects every term under its coset representative.
    pub fn canonicalized(&self, pairing: &PairingStructure) -> Result<Self, ShuffleError> {
        let mut out = Self::new();
        for (t, c) in self.iter() {
            if t.k() != pairing.k() {
                return Err(ShuffleError::PairingMismatch { term: t.k(), pairing: pairing.k() });
            }
            out.add_term(pairing.canonicalize(t), c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.iter().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let space = if i > 0 { " " } else { "" };
            match c.unsigned_abs() {
                1 => write!(f, "{sep}{sign}{space}{t}")?,
                n => write!(f, "{sep}{sign}{space}{n} {t}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Counts terms into a combination, optionally reducing each to its coset
/// representative first.
pub fn collect<I>(terms: I, pairing: &PairingStructure, simplify: bool) -> Result<Combination, ShuffleError>
where
    I: IntoIterator<Item = RefinedTerm>,
{
    let mut out = Combination::new();
    let mut weight = None;
    for term in terms {
        if term.k() != pairing.k() {
            return Err(ShuffleError::PairingMismatch { term: term.k(), pairing: pairing.k() });
        }
        let w = term.weight();
        match weight {
            None => weight = Some(w),
            Some(expected) if expected != w => return Err(ShuffleError::MixedWeight { expected, found: w }),
            _ => {}
        }
        let term = if simplify { pairing.canonicalize(&term) } else { term };
        out.add_term(term, 1)?;
    }
    Ok(out)
}

/// All refined terms obtained by shuffling two chains, one per interleaving,
/// in enumeration order.
pub fn shuffle_terms(left: &Chain, right: &Chain) -> Result<Vec<RefinedTerm>, ShuffleError> {
    let mut seen = std::collections::BTreeSet::new();
    for g in left.generators() {
        seen.insert(g);
    }
    for g in right.generators() {
        if seen.contains(&g) {
            return Err(ShuffleError::Overlap(g.index()));
        }
    }
    enumerate_shuffles(left.len(), right.len())
        .map(|pattern| term_from_word(&ShuffleWord::interleave(left, right, &pattern)?))
        .collect()
}

/// Shuffle product of two explicit chains.
pub fn shuffle_chains(
    left: &Chain,
    right: &Chain,
    pairing: &PairingStructure,
    simplify: bool,
) -> Result<Combination, ShuffleError> {
    collect(shuffle_terms(left, right)?, pairing, simplify)
}

/// Shuffle product of two refined terms. The right factor's generators are
/// renumbered after the left factor's, so `ζ(…)` over `{1,2}` times `ζ(…)`
/// over `{1,2}` becomes a combination over `{1,2,3,4}`.
pub fn shuffle_product(
    a: &RefinedTerm,
    b: &RefinedTerm,
    pairing: &PairingStructure,
    simplify: bool,
) -> Result<Combination, ShuffleError> {
    shuffle_chains(&Chain::from_term(a, 0), &Chain::from_term(b, a.k()), pairing, simplify)
}
