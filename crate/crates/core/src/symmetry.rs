//! Permutations of generator positions and the symmetry group that leaves a
//! refined MDZV unchanged over a Galois-invariant cone.
//!
//! A refined term `ζ^ρ` lists its generators in the order `ρ(1), ρ(2), …`.
//! Conjugating one summation variable, or exchanging two summation variables,
//! relabels generators without changing the value of the sum. Relabeling by
//! `h` turns the order `ρ(j)` into `h(ρ(j))`.
//!
//! Products are written left to right: `ρ * h` means "apply `ρ`, then `h`",
//! so `(ρ * h)(j) = h(ρ(j))`. With this convention the invariance reads
//! `ζ^{ρh} = ζ^ρ` for every `h ∈ H`, two orders are equivalent exactly when
//! `g₁⁻¹ g₂ ∈ H`, and the equivalence classes are the right cosets `ρH`.
//! [`Permutation::compose`] provides the usual right-to-left composition.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

use crate::shuffle::RefinedTerm;

/// Highest degree the cycle notation can express with single-digit points.
pub const MAX_DEGREE: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("cannot parse permutation {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("not a bijection on 1..{degree}: {images:?}")]
    NotBijective { images: Vec<usize>, degree: usize },
    #[error("degree {0} is outside the supported range 1..={MAX_DEGREE}")]
    Degree(usize),
    #[error("invalid pairing: {0}")]
    Pairing(String),
}

/// A bijection of `{1, …, k}`, stored in one-line form.
///
/// `Ord` is the lexicographic order of the one-line form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // images[i] = π(i + 1) - 1
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self { images: (0..degree as u8).collect() }
    }

    /// Builds a permutation from its one-line form `[π(1), …, π(k)]`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self, PermError> {
        let degree = one_line.len();
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::Degree(degree));
        }
        let mut seen = vec![false; degree];
        for &image in one_line {
            if image == 0 || image > degree || seen[image - 1] {
                return Err(PermError::NotBijective { images: one_line.to_vec(), degree });
            }
            seen[image - 1] = true;
        }
        Ok(Self { images: one_line.iter().map(|&i| (i - 1) as u8).collect() })
    }

    /// Parses cycle notation such as `(1)`, `(23)` or `(13)(24)`.
    ///
    /// Points are single digits, cycles are concatenated without separators
    /// and no whitespace is accepted. A point may appear at most once.
    pub fn parse(text: &str, degree: usize) -> Result<Self, PermError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::Degree(degree));
        }
        let fail = |reason: &str| PermError::Parse { input: text.to_string(), reason: reason.to_string() };
        if text.is_empty() {
            return Err(fail("empty input"));
        }
        let mut images: Vec<u8> = (0..degree as u8).collect();
        let mut used = vec![false; degree];
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            if c != '(' {
                return Err(fail("expected '('"));
            }
            let mut cycle = Vec::new();
            loop {
                match chars.next() {
                    Some(')') => break,
                    Some(d) if d.is_ascii_digit() => {
                        let point = d.to_digit(10).unwrap() as usize;
                        if point == 0 || point > degree {
                            return Err(fail(&format!("point {point} outside 1..={degree}")));
                        }
                        if used[point - 1] {
                            return Err(fail(&format!("point {point} repeated")));
                        }
                        used[point - 1] = true;
                        cycle.push(point - 1);
                    }
                    Some(other) => return Err(fail(&format!("unexpected character {other:?}"))),
                    None => return Err(fail("unterminated cycle")),
                }
            }
            if cycle.is_empty() {
                return Err(fail("empty cycle"));
            }
            for (i, &point) in cycle.iter().enumerate() {
                images[point] = cycle[(i + 1) % cycle.len()] as u8;
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the point `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u8; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p as usize] = i as u8;
        }
        Self { images }
    }

    /// Left-to-right product: apply `self`, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        assert_eq!(self.degree(), next.degree(), "degree mismatch");
        Self { images: self.images.iter().map(|&p| next.images[p as usize]).collect() }
    }

    /// Right-to-left composition `self ∘ inner`: apply `inner`, then `self`.
    pub fn compose(&self, inner: &Self) -> Self {
        inner.then(self)
    }

    /// All permutations of the given degree in lexicographic one-line order.
    pub fn all(degree: usize) -> Vec<Self> {
        let mut current: Vec<u8> = (0..degree as u8).collect();
        let mut out = vec![Self { images: current.clone() }];
        while next_permutation(&mut current) {
            out.push(Self { images: current.clone() });
        }
        out
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut cycles = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i] as usize;
            }
            cycles.push(cycle);
        }
        cycles
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// `a * b` applies `a` first, then `b`.
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    /// Disjoint cycles, each starting at its smallest point, fixed points
    /// omitted; the identity prints as `(1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("(1)");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for point in cycle {
                write!(f, "{point}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}", self)
    }
}

pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Which generators are Galois-conjugate, and which conjugate pair belongs to
/// which summation variable.
///
/// Pair `i` is `(base, conjugate)`: the `i`-th summation variable `z` feeds
/// `z` into generator `base` and `z̄` into generator `conjugate`. The
/// invariance subgroup `H` is generated by the transposition of each pair and
/// by the blockwise exchange of consecutive pairs.
#[derive(Clone, PartialEq, Eq)]
pub struct PairingStructure {
    pairs: Vec<(usize, usize)>,
    subgroup: Vec<Permutation>,
}

impl PairingStructure {
    pub fn new(pairs: &[(usize, usize)]) -> Result<Self, PermError> {
        let k = pairs.len() * 2;
        if pairs.is_empty() || k > MAX_DEGREE {
            return Err(PermError::Pairing(format!("{} pairs is outside the supported range", pairs.len())));
        }
        let mut seen = vec![false; k];
        for &(a, b) in pairs {
            for g in [a, b] {
                if g == 0 || g > k {
                    return Err(PermError::Pairing(format!("generator {g} outside 1..={k}")));
                }
                if seen[g - 1] {
                    return Err(PermError::Pairing(format!("generator {g} appears twice")));
                }
                seen[g - 1] = true;
            }
        }
        let mut structure = Self { pairs: pairs.to_vec(), subgroup: Vec::new() };
        structure.subgroup = closure(&structure.generators());
        Ok(structure)
    }

    /// `{(1,2)}`, `{(1,2),(3,4)}`, … : conjugates adjacent, variables in order.
    pub fn standard(k: usize) -> Result<Self, PermError> {
        if k == 0 || !k.is_multiple_of(2) {
            return Err(PermError::Pairing(format!("k = {k} must be even and positive")));
        }
        let pairs: Vec<_> = (0..k / 2).map(|i| (2 * i + 1, 2 * i + 2)).collect();
        Self::new(&pairs)
    }

    pub fn k(&self) -> usize {
        self.pairs.len() * 2
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// For generator `g`, the summation variable feeding it and whether it
    /// receives the conjugate value.
    pub fn role_of(&self, g: usize) -> Option<(usize, bool)> {
        self.pairs.iter().enumerate().find_map(|(var, &(base, conj))| {
            if g == base {
                Some((var, false))
            } else if g == conj {
                Some((var, true))
            } else {
                None
            }
        })
    }

    /// Conjugation of each variable and exchange of consecutive variables.
    pub fn generators(&self) -> Vec<Permutation> {
        let k = self.k();
        let swap = |moves: &[(usize, usize)]| {
            let mut one_line: Vec<usize> = (1..=k).collect();
            for &(a, b) in moves {
                one_line.swap(a - 1, b - 1);
            }
            Permutation::from_one_line(&one_line).expect("swaps of distinct points")
        };
        let mut gens: Vec<_> = self.pairs.iter().map(|&(a, b)| swap(&[(a, b)])).collect();
        for w in self.pairs.windows(2) {
            let ((a1, b1), (a2, b2)) = (w[0], w[1]);
            gens.push(swap(&[(a1, a2), (b1, b2)]));
        }
        gens
    }

    /// The invariance subgroup `H`, sorted lexicographically.
    pub fn subgroup(&self) -> &[Permutation] {
        &self.subgroup
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.subgroup.binary_search(p).is_ok()
    }

    /// Lexicographically smallest element of the coset `ρH`.
    pub fn canonical_perm(&self, rho: &Permutation) -> Permutation {
        self.subgroup.iter().map(|h| rho * h).min().expect("subgroup contains the identity")
    }

    /// Replaces the term's order by its coset representative.
    pub fn canonicalize(&self, term: &RefinedTerm) -> RefinedTerm {
        assert_eq!(term.k(), self.k(), "term and pairing disagree on k");
        RefinedTerm::from_parts(self.canonical_perm(term.order()), term.exponents().to_vec())
    }

    /// `g₁⁻¹ g₂ ∈ H`.
    pub fn same_coset(&self, g1: &Permutation, g2: &Permutation) -> bool {
        self.contains(&(&g1.inverse() * g2))
    }

    /// Partition of the full symmetric group into cosets `ρH`, each sorted,
    /// ordered by representative (its first element).
    pub fn cosets(&self) -> Vec<Vec<Permutation>> {
        let mut classes: std::collections::BTreeMap<Permutation, Vec<Permutation>> = Default::default();
        for p in Permutation::all(self.k()) {
            classes.entry(self.canonical_perm(&p)).or_default().push(p);
        }
        classes.into_values().collect()
    }
}

impl fmt::Debug for PairingStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairingStructure").field("pairs", &self.pairs).field("order", &self.subgroup.len()).finish()
    }
}

fn closure(gens: &[Permutation]) -> Vec<Permutation> {
    let degree = gens[0].degree();
    let mut group: BTreeSet<Permutation> = BTreeSet::from([Permutation::identity(degree)]);
    let mut frontier: Vec<Permutation> = group.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = &p * g;
            if group.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    group.into_iter().collect()
}
