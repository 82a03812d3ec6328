//! Closed intervals over binary64 with outward rounding.
//!
//! Directed rounding is emulated in software. Every primitive computes the
//! round-to-nearest result together with the sign of its exact error (TwoSum
//! for addition, Dekker's product for multiplication, division and square
//! root). The endpoint is then stepped one ulp outward only when the result
//! was actually inexact, so exact results such as `[1,2] + [3,4]` stay exact.
//! Near the overflow and underflow thresholds, where the error-free
//! transforms stop being exact, endpoints are widened unconditionally.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// Below this magnitude the product/quotient residuals may underflow.
const TINY: f64 = 1.0e-290;
/// Above this magnitude the Veltkamp split may overflow.
const HUGE: f64 = 1.0e290;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalError {
    /// Division by an interval that contains zero.
    DivisionByZero,
    /// Argument outside the domain of sqrt or log.
    Domain,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::DivisionByZero => f.write_str("division by an interval containing zero"),
            IntervalError::Domain => f.write_str("argument outside the function domain"),
        }
    }
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

// ---------------------------------------------------------------------------
// error-free transforms

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Dekker's product: `p + e == a * b` exactly when no over/underflow occurs.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

#[inline]
fn from_err(r: f64, err: f64) -> (f64, f64) {
    if err > 0.0 {
        (r, r.next_up())
    } else if err < 0.0 {
        (r.next_down(), r)
    } else {
        (r, r)
    }
}

#[inline]
fn overflowed(r: f64) -> (f64, f64) {
    if r > 0.0 {
        (f64::MAX, f64::INFINITY)
    } else {
        (f64::NEG_INFINITY, f64::MIN)
    }
}

/// Lower and upper bounds of `a + b`.
#[inline]
pub(crate) fn add_du(a: f64, b: f64) -> (f64, f64) {
    let (s, e) = two_sum(a, b);
    if s.is_finite() {
        return from_err(s, e);
    }
    if s.is_nan() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    if a.is_infinite() || b.is_infinite() {
        (s, s)
    } else {
        overflowed(s)
    }
}

/// Lower and upper bounds of `a * b`.
#[inline]
pub(crate) fn mul_du(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 || b == 0.0 {
        let p = a * b;
        if p.is_nan() {
            // 0 * inf: the only way to reach it is an unbounded endpoint
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        return (0.0, 0.0);
    }
    let p = a * b;
    if !p.is_finite() {
        if a.is_infinite() || b.is_infinite() {
            return (p, p);
        }
        return overflowed(p);
    }
    if p.abs() < TINY || a.abs() > HUGE || b.abs() > HUGE {
        return (p.next_down(), p.next_up());
    }
    let (p, e) = two_prod(a, b);
    from_err(p, e)
}

/// Lower and upper bounds of `a / b`, `b != 0`.
#[inline]
pub(crate) fn div_du(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if a == 0.0 && b != 0.0 {
        return (0.0, 0.0);
    }
    if !a.is_finite() || !b.is_finite() || !q.is_finite() {
        if q.is_nan() {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        if q.is_infinite() && a.is_finite() {
            return overflowed(q);
        }
        return (q.next_down(), q.next_up());
    }
    if q.abs() < TINY || a.abs() < TINY || q.abs() > HUGE || b.abs() > HUGE {
        return (q.next_down(), q.next_up());
    }
    // residual a - q*b is exactly representable
    let (p, e) = two_prod(q, b);
    let r = (a - p) - e;
    let err = if b > 0.0 { r } else { -r };
    from_err(q, err)
}

/// Lower and upper bounds of `sqrt(a)`, `a >= 0`.
#[inline]
pub(crate) fn sqrt_du(a: f64) -> (f64, f64) {
    let r = libm::sqrt(a);
    if a == 0.0 || a.is_infinite() {
        return (r, r);
    }
    if !(TINY..=HUGE).contains(&a) {
        return (r.next_down(), r.next_up());
    }
    let (p, e) = two_prod(r, r);
    let res = (a - p) - e;
    from_err(r, res)
}

// ---------------------------------------------------------------------------
// constants

/// Bounding doubles of pi; the nearest double lies below.
const PI_LO: f64 = core::f64::consts::PI;
const PI_HI: f64 = 3.1415926535897936;

/// ln 2 = LN2_HI + ln2_lo, with LN2_HI carrying 33 significant bits.
const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO_LO: f64 = 1.9082149292705877e-10;
const LN2_LO_HI: f64 = 1.908214929270588e-10;

/// pi/2 = PIO2_1 + PIO2_2 + tail, the first two with 33 significant bits.
const PIO2_1: f64 = 1.570_796_326_734_125_6;
const PIO2_2: f64 = 6.077_100_506_303_966e-11;
const PIO2_T_LO: f64 = 2.0222662487959506e-21;
const PIO2_T_HI: f64 = 2.022266248795951e-21;

/// sinc is decreasing in |x| on [0, 4.4934...].
const SINC_MONO: f64 = 4.4;
const SINC_PI_MONO: f64 = 1.4;

const SERIES_SWITCH: f64 = 0.5;

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const PI: Interval = Interval { lo: PI_LO, hi: PI_HI };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Builds `[lo, hi]`.
    ///
    /// # Panics
    /// If `lo > hi`, either endpoint is NaN, `lo == +inf` or `hi == -inf`.
    pub fn new(lo: f64, hi: f64) -> Interval {
        Self::try_new(lo, hi).expect("invalid interval endpoints")
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Interval> {
        if lo <= hi && lo != f64::INFINITY && hi != f64::NEG_INFINITY {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Smallest interval containing both `a` and `b`.
    pub fn between(a: f64, b: f64) -> Interval {
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    /// Enclosure of `p / q`.
    pub fn ratio(p: f64, q: f64) -> Interval {
        assert!(q != 0.0, "zero denominator");
        let (lo, hi) = div_du(p, q);
        Interval { lo, hi }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(self) -> f64 {
        add_du(self.hi, -self.lo).1
    }

    pub fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            if self.lo.is_finite() {
                return f64::MAX;
            }
            if self.hi.is_finite() {
                return f64::MIN;
            }
            return 0.0;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Widens both endpoints outward by `r >= 0`.
    pub fn inflate(self, r: f64) -> Interval {
        Interval {
            lo: add_du(self.lo, -r).0,
            hi: add_du(self.hi, r).1,
        }
    }

    /// Splits at the midpoint.
    pub fn bisect(self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval {
            lo: mul_du(a.lo, a.lo).0,
            hi: mul_du(a.hi, a.hi).1,
        }
    }

    pub fn div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains(0.0) {
            return Err(IntervalError::DivisionByZero);
        }
        let (a, b) = (self, rhs);
        let cands = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in cands {
            let (d, u) = div_du(x, y);
            lo = lo.min(d);
            hi = hi.max(u);
        }
        Ok(Interval { lo, hi })
    }

    pub fn recip(self) -> Result<Interval, IntervalError> {
        Interval::ONE.div(self)
    }

    /// Division by a nonzero scalar.
    pub fn div_f64(self, d: f64) -> Interval {
        assert!(d != 0.0, "zero divisor");
        let (a, b) = (div_du(self.lo, d), div_du(self.hi, d));
        if d > 0.0 {
            Interval { lo: a.0, hi: b.1 }
        } else {
            Interval { lo: b.0, hi: a.1 }
        }
    }

    /// `self^k`, evaluated by parity rather than repeated multiplication.
    pub fn pow_int(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::ONE;
        }
        if k % 2 == 0 {
            let a = self.abs();
            Interval {
                lo: pow_pos(a.lo, k).lo,
                hi: pow_pos(a.hi, k).hi,
            }
        } else {
            let lo = if self.lo >= 0.0 {
                pow_pos(self.lo, k).lo
            } else {
                -pow_pos(-self.lo, k).hi
            };
            let hi = if self.hi >= 0.0 {
                pow_pos(self.hi, k).hi
            } else {
                -pow_pos(-self.hi, k).lo
            };
            Interval { lo, hi }
        }
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain);
        }
        Ok(Interval {
            lo: sqrt_du(self.lo).0,
            hi: sqrt_du(self.hi).1,
        })
    }

    pub fn exp(self) -> Interval {
        Interval {
            lo: exp_point(self.lo).lo,
            hi: exp_point(self.hi).hi,
        }
    }

    pub fn log(self) -> Result<Interval, IntervalError> {
        if !(self.lo > 0.0) {
            return Err(IntervalError::Domain);
        }
        Ok(Interval {
            lo: log_point(self.lo).lo,
            hi: log_point(self.hi).hi,
        })
    }

    pub fn sin(self) -> Interval {
        periodic(self, Trig::Sin)
    }

    pub fn cos(self) -> Interval {
        periodic(self, Trig::Cos)
    }

    /// `sin(pi * self)` with exact argument reduction.
    pub fn sin_pi(self) -> Interval {
        periodic_pi(self, Trig::Sin)
    }

    /// `cos(pi * self)` with exact argument reduction.
    pub fn cos_pi(self) -> Interval {
        periodic_pi(self, Trig::Cos)
    }

    /// `sin(x)/x`, equal to 1 at 0. Result lies in `[-0.22, 1]`.
    pub fn sinc(self) -> Interval {
        let a = self.abs();
        let r = if a.hi <= SINC_MONO {
            sinc_mono(a)
        } else if a.lo >= SINC_MONO {
            sinc_quot(a)
        } else {
            sinc_mono(Interval::new(a.lo, SINC_MONO)).hull(sinc_quot(Interval::new(SINC_MONO, a.hi)))
        };
        clamp(r, -0.22, 1.0)
    }

    /// `sinc(pi * self)`.
    pub fn sinc_pi(self) -> Interval {
        let a = self.abs();
        let mono = |b: Interval| sinc_mono(Interval::PI * b);
        let quot = |b: Interval| {
            let den = Interval::PI * b;
            b.sin_pi().div(den).unwrap_or(Interval::new(-0.22, 1.0))
        };
        let r = if a.hi <= SINC_PI_MONO {
            mono(a)
        } else if a.lo >= SINC_PI_MONO {
            quot(a)
        } else {
            mono(Interval::new(a.lo, SINC_PI_MONO)).hull(quot(Interval::new(SINC_PI_MONO, a.hi)))
        };
        clamp(r, -0.22, 1.0)
    }

    /// `R(x) = (sin x - x + x^3/6) / x^3` with `R(0) = 0`; increasing in |x|.
    pub fn remainder_r(self) -> Interval {
        let a = self.abs();
        let r = Interval {
            lo: remainder_r_point(a.lo).lo,
            hi: remainder_r_point(a.hi).hi,
        };
        clamp(r, 0.0, SIXTH_HI)
    }

    /// `S3(u) = (u - sin u) / u^3` with `S3(0) = 1/6`.
    pub fn s3_kernel(self) -> Interval {
        let r = sixth() - self.remainder_r();
        clamp(r, 0.0, SIXTH_HI)
    }
}

const SIXTH_HI: f64 = 0.16666666666666669;

fn sixth() -> Interval {
    Interval::ratio(1.0, 6.0)
}

fn clamp(r: Interval, lo: f64, hi: f64) -> Interval {
    Interval {
        lo: r.lo.max(lo).min(hi),
        hi: r.hi.min(hi).max(lo),
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Interval {
        Interval::point(x)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_du(self.lo, rhs.lo).0,
            hi: add_du(self.hi, rhs.hi).1,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        if a.lo >= 0.0 && b.lo >= 0.0 {
            return Interval {
                lo: mul_du(a.lo, b.lo).0,
                hi: mul_du(a.hi, b.hi).1,
            };
        }
        let cands = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in cands {
            let (d, u) = mul_du(x, y);
            lo = lo.min(d);
            hi = hi.max(u);
        }
        Interval { lo, hi }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            #[inline]
            fn $m(self, rhs: f64) -> Interval {
                $tr::$m(self, Interval::point(rhs))
            }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            #[inline]
            fn $m(self, rhs: Interval) -> Interval {
                $tr::$m(Interval::point(self), rhs)
            }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul);

impl core::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

// ---------------------------------------------------------------------------
// point kernels

/// `x^k` for `x >= 0` by binary powering.
fn pow_pos(x: f64, mut k: u32) -> Interval {
    let mut base = Interval::point(x);
    let mut acc = Interval::ONE;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base;
        }
        k >>= 1;
        if k > 0 {
            base = base * base;
        }
    }
    acc
}

/// Multiplies by `2^k` exactly, widening if the result is subnormal.
fn scale2(x: Interval, k: i32) -> Interval {
    let lo = libm::scalbn(x.lo, k);
    let hi = libm::scalbn(x.hi, k);
    if k < 0 && (lo.abs() < 1.0e-300 || hi.abs() < 1.0e-300) {
        return Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        };
    }
    Interval { lo, hi }
}

const LN2_LO: Interval = Interval {
    lo: LN2_LO_LO,
    hi: LN2_LO_HI,
};

fn ln2_times(k: f64) -> Interval {
    // k * LN2_HI is exact for |k| < 2^20
    Interval::point(k * LN2_HI) + LN2_LO * k
}

/// Taylor polynomial of exp around 0 with Lagrange remainder, `|r| <= 0.36`.
fn exp_kernel(r: Interval) -> Interval {
    const TERMS: u32 = 18;
    let mut p = Interval::ONE;
    for j in (1..=TERMS).rev() {
        p = 1.0 + (p * r).div_f64(j as f64);
    }
    // |rem| <= |r|^19/19! * e^|r| < 0.36^19 / 19! * 1.5
    let m = r.mag();
    let rem = mul_du(pow_pos(m, TERMS + 1).hi, 1.5 / 1.2e17).1;
    p.inflate(rem)
}

fn exp_point(x: f64) -> Interval {
    if x == 0.0 {
        return Interval::ONE;
    }
    if x.is_nan() {
        return Interval::ENTIRE;
    }
    if x >= 709.79 {
        return Interval {
            lo: f64::MAX,
            hi: f64::INFINITY,
        };
    }
    if x <= -745.2 {
        return Interval {
            lo: 0.0,
            hi: f64::from_bits(1),
        };
    }
    let k = libm::round(x * core::f64::consts::LOG2_E);
    // x - k*LN2_HI is exact by Sterbenz; the small part comes off afterwards
    let r = Interval::point(x) - k * LN2_HI - LN2_LO * k;
    let p = exp_kernel(r);
    let k = k as i32;
    // split the scaling so 2^k never overflows on its own
    scale2(scale2(p, k / 2), k - k / 2)
}

fn log_point(x: f64) -> Interval {
    if x == 1.0 {
        return Interval::ZERO;
    }
    if x == f64::INFINITY {
        return Interval {
            lo: 709.0,
            hi: f64::INFINITY,
        };
    }
    let (mut m, mut e) = libm::frexp(x);
    if m < core::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        e -= 1;
    }
    // m in [0.707, 1.415); m - 1 is exact
    let num = Interval::point(m - 1.0);
    let den = Interval::point(m) + 1.0;
    let u = num.div(den).expect("positive denominator");
    let u2 = u.sqr();
    const TERMS: u32 = 16;
    let mut p = Interval::ratio(1.0, (2 * TERMS + 1) as f64);
    for j in (0..TERMS).rev() {
        p = Interval::ratio(1.0, (2 * j + 1) as f64) + u2 * p;
    }
    let s = 2.0 * (u * p);
    // tail <= 2|u|^(2T+3) / ((2T+3)(1-u^2)), |u| <= 0.172
    let um = u.mag();
    let rem = mul_du(pow_pos(um, 2 * TERMS + 3).hi, 2.0 / ((2 * TERMS + 3) as f64 * 0.97)).1;
    s.inflate(rem) + ln2_times(e as f64)
}

/// sin on `|z| <= 0.8` by Taylor with alternating remainder.
fn sin_kernel(z: Interval) -> Interval {
    const TERMS: u32 = 11;
    let z2 = z.sqr();
    let mut p = Interval::ONE;
    for j in (1..=TERMS).rev() {
        let d = ((2 * j) * (2 * j + 1)) as f64;
        p = 1.0 - (z2 * p).div_f64(d);
    }
    let m = z.mag();
    // next term |z|^(2T+3)/(2T+3)!, 25! ~ 1.55e25
    let rem = mul_du(pow_pos(m, 2 * TERMS + 3).hi, 1.0 / 1.55e25).1;
    (z * p).inflate(rem)
}

fn cos_kernel(z: Interval) -> Interval {
    const TERMS: u32 = 11;
    let z2 = z.sqr();
    let mut p = Interval::ONE;
    for j in (1..=TERMS).rev() {
        let d = ((2 * j - 1) * (2 * j)) as f64;
        p = 1.0 - (z2 * p).div_f64(d);
    }
    let m = z.mag();
    // 24! ~ 6.2e23
    let rem = mul_du(pow_pos(m, 2 * TERMS + 2).hi, 1.0 / 6.2e23).1;
    p.inflate(rem)
}

#[derive(Clone, Copy, PartialEq)]
enum Trig {
    Sin,
    Cos,
}

/// Enclosures of (sin x, cos x) for a point x.
fn sin_cos_point(x: f64) -> (Interval, Interval) {
    let full = Interval::new(-1.0, 1.0);
    if !x.is_finite() || x.abs() > 1.0e5 {
        return (full, full);
    }
    if x.abs() <= 0.78 {
        let z = Interval::point(x);
        return (sin_kernel(z), cos_kernel(z));
    }
    let k = libm::round(x * core::f64::consts::FRAC_2_PI);
    // k * PIO2_1 and k * PIO2_2 are exact for |k| < 2^20
    let tail = Interval {
        lo: PIO2_T_LO,
        hi: PIO2_T_HI,
    };
    let r = ((Interval::point(x) - k * PIO2_1) - k * PIO2_2) - tail * k;
    let (s, c) = (sin_kernel(r), cos_kernel(r));
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// Enclosures of (sin pi*y, cos pi*y) for a point y.
fn sin_cos_pi_point(y: f64) -> (Interval, Interval) {
    let full = Interval::new(-1.0, 1.0);
    if !y.is_finite() {
        return (full, full);
    }
    if y.abs() >= 4_503_599_627_370_496.0 {
        // every such double is an integer
        let even = y.abs() >= 9_007_199_254_740_992.0 || (y % 2.0) == 0.0;
        return (Interval::ZERO, Interval::point(if even { 1.0 } else { -1.0 }));
    }
    let r = if y.abs() <= 1.0 {
        y
    } else {
        y - 2.0 * libm::round(0.5 * y)
    };
    let neg = r < 0.0;
    let mut a = r.abs();
    let mut cos_sign = 1.0;
    if a > 0.5 {
        a = 1.0 - a;
        cos_sign = -1.0;
    }
    let (s, c) = if a <= 0.25 {
        let z = Interval::PI * a;
        (sin_kernel(z), cos_kernel(z))
    } else {
        let z = Interval::PI * (0.5 - a);
        (cos_kernel(z), sin_kernel(z))
    };
    let s = if neg { -s } else { s };
    let c = if cos_sign < 0.0 { -c } else { c };
    (s, c)
}

fn sign_for(j: i64) -> f64 {
    if j.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn periodic(x: Interval, which: Trig) -> Interval {
    let full = Interval::new(-1.0, 1.0);
    if !x.lo.is_finite() || !x.hi.is_finite() || x.hi - x.lo >= 6.3 {
        return full;
    }
    let pick = |v: f64| {
        let (s, c) = sin_cos_point(v);
        if which == Trig::Sin {
            s
        } else {
            c
        }
    };
    let mut r = pick(x.lo).hull(pick(x.hi));
    // extrema of sin sit at (j + 1/2) pi, of cos at j pi
    let shift = if which == Trig::Sin { 0.5 } else { 0.0 };
    let jlo = libm::floor(x.lo / PI_LO - shift) as i64 - 1;
    let jhi = libm::ceil(x.hi / PI_LO - shift) as i64 + 1;
    for j in jlo..=jhi {
        let c = Interval::PI * (j as f64 + shift);
        if c.hi >= x.lo && c.lo <= x.hi {
            r = r.hull(Interval::point(sign_for(j)));
        }
    }
    clamp(r, -1.0, 1.0)
}

fn periodic_pi(y: Interval, which: Trig) -> Interval {
    let full = Interval::new(-1.0, 1.0);
    if !y.lo.is_finite() || !y.hi.is_finite() || y.hi - y.lo >= 2.0 {
        return full;
    }
    let pick = |v: f64| {
        let (s, c) = sin_cos_pi_point(v);
        if which == Trig::Sin {
            s
        } else {
            c
        }
    };
    let mut r = pick(y.lo).hull(pick(y.hi));
    let shift = if which == Trig::Sin { 0.5 } else { 0.0 };
    let jlo = libm::floor(y.lo - shift) as i64;
    let jhi = libm::ceil(y.hi - shift) as i64;
    for j in jlo..=jhi {
        let c = j as f64 + shift;
        if y.lo <= c && c <= y.hi {
            r = r.hull(Interval::point(sign_for(j)));
        }
    }
    clamp(r, -1.0, 1.0)
}

/// Series path for `sin(x)/x`.
pub fn sinc_series(x: f64) -> Interval {
    const TERMS: u32 = 9;
    let z2 = Interval::point(x).sqr();
    let mut p = Interval::ONE;
    for j in (1..=TERMS).rev() {
        let d = ((2 * j) * (2 * j + 1)) as f64;
        p = 1.0 - (z2 * p).div_f64(d);
    }
    // next term x^20/21!, 21! ~ 5.1e19
    let rem = mul_du(pow_pos(x.abs(), 2 * TERMS + 2).hi, 1.0 / 5.1e19).1;
    p.inflate(rem)
}

/// Direct path for `sin(x)/x`, `x != 0`.
pub fn sinc_direct(x: f64) -> Interval {
    let (s, _) = sin_cos_point(x);
    s.div_f64(x)
}

fn sinc_point(x: f64) -> Interval {
    if x.abs() < SERIES_SWITCH {
        sinc_series(x)
    } else {
        sinc_direct(x)
    }
}

fn sinc_mono(a: Interval) -> Interval {
    Interval {
        lo: sinc_point(a.hi).lo,
        hi: sinc_point(a.lo).hi,
    }
}

fn sinc_quot(a: Interval) -> Interval {
    a.sin()
        .div(a)
        .unwrap_or(Interval::new(-0.22, 1.0))
}

/// Series path for R.
pub fn remainder_r_series(x: f64) -> Interval {
    // R(x) = x^2/5! - x^4/7! + ... = (x^2/120) (1 - x^2/(6*7) (1 - x^2/(8*9) ...))
    const TERMS: u32 = 8;
    let z2 = Interval::point(x).sqr();
    let mut p = Interval::ONE;
    for j in (1..=TERMS).rev() {
        let d = ((2 * j + 4) * (2 * j + 5)) as f64;
        p = 1.0 - (z2 * p).div_f64(d);
    }
    // next term x^(2T+2)/(2T+5)!, 21! ~ 5.1e19
    let rem = mul_du(pow_pos(x.abs(), 2 * TERMS + 2).hi, 1.0 / 5.1e19).1;
    (z2.div_f64(120.0) * p).inflate(rem)
}

/// Direct path for R, `x != 0`.
pub fn remainder_r_direct(x: f64) -> Interval {
    let (s, _) = sin_cos_point(x);
    let xi = Interval::point(x);
    let x3 = xi.pow_int(3);
    let num = (s - xi) + x3.div_f64(6.0);
    num.div(x3).expect("nonzero argument")
}

fn remainder_r_point(x: f64) -> Interval {
    if x.abs() < SERIES_SWITCH {
        remainder_r_series(x)
    } else {
        remainder_r_direct(x)
    }
}

/// Series path for S3.
pub fn s3_series(x: f64) -> Interval {
    sixth() - remainder_r_series(x)
}

/// Direct path for S3, `x != 0`.
pub fn s3_direct(x: f64) -> Interval {
    let (s, _) = sin_cos_point(x);
    let xi = Interval::point(x);
    (xi - s).div(xi.pow_int(3)).expect("nonzero argument")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_results_stay_exact() {
        let a = Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0);
        assert_eq!((a.lo(), a.hi()), (4.0, 6.0));
        let m = Interval::new(-1.0, 2.0) * Interval::new(-1.0, 2.0);
        assert_eq!((m.lo(), m.hi()), (-2.0, 4.0));
        let p = Interval::point(2.0).pow_int(10);
        assert_eq!((p.lo(), p.hi()), (1024.0, 1024.0));
    }

    #[test]
    fn third_is_tight() {
        let t = Interval::ONE.div(Interval::point(3.0)).unwrap();
        assert!(t.hi() == t.lo().next_up());
    }

    #[test]
    fn sqrt_residual_sign() {
        let s = Interval::point(2.0).sqrt().unwrap();
        assert!(s.contains(core::f64::consts::SQRT_2) || s.hi() == s.lo().next_up());
        let four = Interval::point(4.0).sqrt().unwrap();
        assert!(four.is_point());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            Interval::ONE.div(Interval::new(-1.0, 1.0)),
            Err(IntervalError::DivisionByZero)
        );
        assert_eq!(Interval::new(-1.0, 1.0).sqrt(), Err(IntervalError::Domain));
        assert_eq!(Interval::ZERO.log(), Err(IntervalError::Domain));
    }

    #[test]
    fn sin_pi_at_integers_is_exact_zero() {
        for k in -6..=6 {
            let s = Interval::point(k as f64).sin_pi();
            assert_eq!((s.lo(), s.hi()), (0.0, 0.0));
        }
    }
}
