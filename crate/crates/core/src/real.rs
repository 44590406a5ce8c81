//! Scalar backends for numeric evaluation: `f64` and a 200-bit software
//! float, both behind [`Real`], plus a minimal complex type and a
//! compensated accumulator.

use std::fmt;

use dashu_float::FBig;

/// Mantissa bits of the extended backend (about 60 decimal digits).
pub const EXTENDED_BITS: usize = 200;

pub trait Real: Clone + PartialOrd + Send + Sync + fmt::Debug + 'static {
    /// Significant decimal digits worth printing.
    const DIGITS: usize;

    fn from_i64(v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Decimal rendering with up to `digits` significant digits.
    fn to_decimal_string(&self, digits: usize) -> String;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    const DIGITS: usize = 17;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_decimal_string(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

/// Binary software float with [`EXTENDED_BITS`] of mantissa.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Extended(FBig);

impl Extended {
    fn wrap(x: FBig) -> Self {
        Self(x.with_precision(EXTENDED_BITS).value())
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(40))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(40))
    }
}

impl Real for Extended {
    const DIGITS: usize = 50;

    fn from_i64(v: i64) -> Self {
        Self::wrap(FBig::from(v))
    }
    fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Self(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        Self(&self.0 / &rhs.0)
    }
    fn neg(&self) -> Self {
        Self(-self.0.clone())
    }
    fn sqrt(&self) -> Self {
        Self(self.0.sqrt())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn to_decimal_string(&self, digits: usize) -> String {
        let dec = self.0.to_decimal().value();
        dec.with_precision(digits).value().to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex<S> {
    pub re: S,
    pub im: S,
}

impl<S: Real> Complex<S> {
    pub fn new(re: S, im: S) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn one() -> Self {
        Self::new(S::one(), S::zero())
    }

    pub fn from_real(re: S) -> Self {
        Self::new(re, S::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn norm_sqr(&self) -> S {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `1/z`, or `None` at zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(self.re.div(&n), self.im.neg().div(&n)))
    }

    /// `z^e` by repeated multiplication.
    pub fn powu(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64();
        re.hypot(im)
    }
}

/// Neumaier (improved Kahan) summation; plain summation when disabled.
#[derive(Clone, Debug)]
pub struct Accumulator<S> {
    sum: S,
    comp: S,
    compensated: bool,
}

impl<S: Real> Accumulator<S> {
    pub fn new(compensated: bool) -> Self {
        Self { sum: S::zero(), comp: S::zero(), compensated }
    }

    pub fn add(&mut self, x: &S) {
        let t = self.sum.add(x);
        if self.compensated {
            if self.sum.abs() >= x.abs() {
                self.comp = self.comp.add(&self.sum.sub(&t).add(x));
            } else {
                self.comp = self.comp.add(&x.sub(&t).add(&self.sum));
            }
        }
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum.add(&self.comp)
    }
}

#[derive(Clone, Debug)]
pub struct ComplexAccumulator<S> {
    re: Accumulator<S>,
    im: Accumulator<S>,
}

impl<S: Real> ComplexAccumulator<S> {
    pub fn new(compensated: bool) -> Self {
        Self { re: Accumulator::new(compensated), im: Accumulator::new(compensated) }
    }

    pub fn add(&mut self, z: &Complex<S>) {
        self.re.add(&z.re);
        self.im.add(&z.im);
    }

    pub fn value(&self) -> Complex<S> {
        Complex::new(self.re.value(), self.im.value())
    }
}
