//! Imaginary quadratic rings `Z[ω]`, the cone `Re > 0`, and radius-bounded
//! enumeration of cone elements.

use std::fmt;

use thiserror::Error;

use crate::real::{Complex, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("bad discriminant {0}: need a squarefree negative integer")]
    BadDiscriminant(i64),
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// `Q(√d)` for squarefree `d < 0`, with integral basis `{1, ω}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    d: i64,
}

pub fn make_field(d: i64) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(d)
}

fn squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        if !(-(1 << 40)..0).contains(&d) || !squarefree(d) {
            return Err(FieldError::BadDiscriminant(d));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// `ω = (1+√d)/2` when `d ≡ 1 (mod 4)`, otherwise `ω = √d`.
    pub fn half_integral(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    pub fn trace_omega(&self) -> i64 {
        if self.half_integral() {
            1
        } else {
            0
        }
    }

    pub fn norm_omega(&self) -> i64 {
        if self.half_integral() {
            (1 - self.d) / 4
        } else {
            -self.d
        }
    }

    pub fn omega_string(&self) -> String {
        if self.half_integral() {
            format!("(1+√{})/2", self.d)
        } else {
            format!("√{}", self.d)
        }
    }

    pub fn in_cone(&self, x: RingElement) -> bool {
        self.twice_re(x) > 0
    }

    /// Cone plus the ray `Re = 0, Im > 0`.
    pub fn in_closed_cone(&self, x: RingElement) -> bool {
        let re2 = self.twice_re(x);
        re2 > 0 || (re2 == 0 && x.b > 0)
    }

    fn twice_re(&self, x: RingElement) -> i64 {
        2 * x.a + x.b * self.trace_omega()
    }

    pub fn conj(&self, x: RingElement) -> RingElement {
        if self.half_integral() {
            RingElement::new(x.a + x.b, -x.b)
        } else {
            RingElement::new(x.a, -x.b)
        }
    }

    /// `N(x) = x·x̄ = a² + ab·Tr(ω) + b²·N(ω)`.
    pub fn norm(&self, x: RingElement) -> i64 {
        x.a * x.a + x.a * x.b * self.trace_omega() + x.b * x.b * self.norm_omega()
    }

    /// `ω` as a complex number in the given backend.
    pub fn omega<S: Real>(&self) -> Complex<S> {
        let root = S::from_i64(-self.d).sqrt();
        if self.half_integral() {
            let two = S::from_i64(2);
            Complex::new(S::one().div(&two), root.div(&two))
        } else {
            Complex::new(S::zero(), root)
        }
    }

    /// Embedding with `ω` precomputed by [`FieldSpec::omega`].
    pub fn embed_with<S: Real>(&self, omega: &Complex<S>, x: RingElement) -> Complex<S> {
        let a = S::from_i64(x.a);
        let b = S::from_i64(x.b);
        Complex::new(a.add(&b.mul(&omega.re)), b.mul(&omega.im))
    }

    pub fn embed<S: Real>(&self, x: RingElement) -> Complex<S> {
        self.embed_with(&self.omega(), x)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.d)
    }
}

/// `a + bω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    pub a: i64,
    pub b: i64,
}

impl RingElement {
    pub fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl std::ops::Add for RingElement {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}ω"),
            (a, b) if b < 0 => write!(f, "{a}-{}ω", -b),
            (a, b) => write!(f, "{a}+{b}ω"),
        }
    }
}

/// Cone elements with `|x| ≤ radius`, ordered by `(norm, a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationSet {
    field: FieldSpec,
    radius: f64,
    include_boundary: bool,
    elements: Vec<RingElement>,
}

pub fn enumerate_cone(field: FieldSpec, radius: f64) -> Result<TruncationSet, FieldError> {
    TruncationSet::new(field, radius, false)
}

impl TruncationSet {
    /// With `include_boundary` the ray `Re = 0, Im > 0` is added; that set is
    /// no longer closed under conjugation.
    pub fn new(field: FieldSpec, radius: f64, include_boundary: bool) -> Result<Self, FieldError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FieldError::BadRadius(radius));
        }
        let r2 = radius * radius;
        let im_omega = ((-field.d) as f64).sqrt() / if field.half_integral() { 2.0 } else { 1.0 };
        let b_max = (radius / im_omega).floor() as i64 + 1;
        let a_max = radius.floor() as i64 + b_max + 1;
        let mut elements = Vec::new();
        for b in -b_max..=b_max {
            for a in -a_max..=a_max {
                let x = RingElement::new(a, b);
                let inside = if include_boundary { field.in_closed_cone(x) } else { field.in_cone(x) };
                if inside && (field.norm(x) as f64) <= r2 {
                    elements.push(x);
                }
            }
        }
        elements.sort_by_key(|&x| (field.norm(x), x.a, x.b));
        Ok(Self { field, radius, include_boundary, elements })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn include_boundary(&self) -> bool {
        self.include_boundary
    }

    pub fn elements(&self) -> &[RingElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_conjugation_closed(&self) -> bool {
        let mut conj: Vec<_> = self.elements.iter().map(|&x| self.field.conj(x)).collect();
        let mut own = self.elements.clone();
        conj.sort();
        own.sort();
        conj == own
    }
}
