//! Branch-and-bound certificates for the sign conditions on `psi` and
//! `psi_hat`.
//!
//! Every check reduces to "an interval extension of a scalar expression has
//! a nonnegative lower end on every leaf box". Leaves are produced by
//! bisection; a box is discharged only when `f(box).lo >= 0`, with no slack.
//! Infinite sums are split into the table head `|n| <= N` and two-sided tail
//! enclosures, so the interval result always contains the exact value.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::auxfn::AuxCoefficients;
use crate::interval::Interval;
use crate::potential::{solve_s_alpha, validate_alpha, PotentialContext, PotentialError, DEFAULT_TOL};

/// Truncation used for the sums inside certified expressions.
pub const CERT_N: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InequalityId {
    #[serde(rename = "T_alpha")]
    TAlpha,
    #[serde(rename = "L_alpha")]
    LAlpha,
    #[serde(rename = "psi4_le_F4")]
    Psi4LeF4,
    #[serde(rename = "eta0")]
    Eta0,
    #[serde(rename = "eta1")]
    Eta1,
    #[serde(rename = "eta_ge2")]
    EtaGe2,
    #[serde(rename = "w_inequality")]
    WInequality,
    #[serde(rename = "far_field_const")]
    FarFieldConst,
    /// A caller-supplied expression run through [`prove_nonneg`].
    #[serde(rename = "expression")]
    Expression,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Inconclusive,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitRule {
    #[serde(rename = "widest_bisection")]
    WidestBisection,
}

/// Limits for the subdivision. Boxes at depth `d` are evaluated only when
/// `d < max_depth`, so `max_depth = 0` evaluates nothing.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BnbPolicy {
    pub max_depth: u32,
    pub split_rule: SplitRule,
    pub budget: u64,
    /// Millisecond clock for `wall_time_ms`; without one the field is 0.
    #[serde(skip)]
    pub clock: Option<fn() -> u64>,
}

impl PartialEq for BnbPolicy {
    fn eq(&self, o: &BnbPolicy) -> bool {
        self.max_depth == o.max_depth && self.split_rule == o.split_rule && self.budget == o.budget
    }
}

impl Default for BnbPolicy {
    fn default() -> BnbPolicy {
        BnbPolicy {
            max_depth: 48,
            split_rule: SplitRule::WidestBisection,
            budget: 10_000_000,
            clock: None,
        }
    }
}

impl BnbPolicy {
    pub fn with_max_depth(mut self, d: u32) -> BnbPolicy {
        self.max_depth = d;
        self
    }

    pub fn with_clock(mut self, clock: fn() -> u64) -> BnbPolicy {
        self.clock = Some(clock);
        self
    }

    fn now(&self) -> u64 {
        self.clock.map_or(0, |c| c())
    }
}

/// A point where the thin evaluation is strictly negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Absent for constant checks.
    pub point: Option<f64>,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub inequality_id: InequalityId,
    pub alpha: u32,
    pub domain: String,
    pub status: Status,
    pub boxes_processed: u64,
    /// Deepest level reached.
    pub max_depth: u32,
    /// Smallest lower bound over the leaves; on early exit the stopping and
    /// pending boxes count as leaves. `-inf` if nothing was evaluated.
    pub min_lower_bound: f64,
    pub wall_time_ms: u64,
    pub witness: Option<Witness>,
    /// The inequality that was evaluated, written out.
    pub anchor: String,
    pub policy: BnbPolicy,
}

impl Certificate {
    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyError {
    /// The requested exponent is outside the regime of the check.
    Precondition(String),
    Potential(PotentialError),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CertifyError::Potential(e) => write!(f, "{e}"),
        }
    }
}

impl From<PotentialError> for CertifyError {
    fn from(e: PotentialError) -> CertifyError {
        CertifyError::Potential(e)
    }
}

fn precondition(m: String) -> CertifyError {
    CertifyError::Precondition(m)
}

/// Outcome of one or more subdivisions before it is stamped into a certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Tally {
    status: Status,
    boxes: u64,
    depth: u32,
    min_lb: f64,
    witness: Option<Witness>,
}

impl Tally {
    fn empty() -> Tally {
        Tally {
            status: Status::Verified,
            boxes: 0,
            depth: 0,
            min_lb: f64::INFINITY,
            witness: None,
        }
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            status: self.status.max(o.status),
            boxes: self.boxes + o.boxes,
            depth: self.depth.max(o.depth),
            min_lb: self.min_lb.min(o.min_lb),
            witness: self.witness.or(o.witness),
        }
    }
}

/// Depth-first bisection. `min_lb` is taken over a cover of the domain:
/// the discharged leaves plus, on early exit, the stopping box and every
/// pending box. Deeper policies refine that cover, so the bound cannot drop.
fn bnb<F: Fn(Interval) -> Interval>(f: &F, domain: Interval, policy: &BnbPolicy) -> Tally {
    let mut t = Tally::empty();
    if policy.max_depth == 0 || policy.budget == 0 {
        t.status = Status::Inconclusive;
        t.min_lb = f64::NEG_INFINITY;
        return t;
    }
    let mut stack = vec![(domain, 0u32)];
    while let Some((b, d)) = stack.pop() {
        if t.boxes >= policy.budget {
            t.status = Status::Inconclusive;
            stack.push((b, d));
            break;
        }
        t.boxes += 1;
        t.depth = t.depth.max(d);
        let v = f(b);
        if v.lo() >= 0.0 {
            t.min_lb = t.min_lb.min(v.lo());
            continue;
        }
        let m = b.mid();
        let vm = f(Interval::point(m));
        if vm.hi() < 0.0 {
            t.status = Status::Failed;
            t.min_lb = t.min_lb.min(v.lo());
            t.witness = Some(Witness {
                point: Some(m),
                upper: vm.hi(),
            });
            break;
        }
        if d + 1 >= policy.max_depth || m <= b.lo() || m >= b.hi() {
            t.status = Status::Inconclusive;
            t.min_lb = t.min_lb.min(v.lo());
            break;
        }
        let (l, r) = b.bisect();
        stack.push((r, d + 1));
        stack.push((l, d + 1));
    }
    if t.status != Status::Verified {
        for &(b, _) in &stack {
            t.min_lb = t.min_lb.min(f(b).lo());
        }
    }
    t
}

fn constant(v: Interval, policy: &BnbPolicy) -> Tally {
    let mut t = Tally::empty();
    if policy.max_depth == 0 || policy.budget == 0 {
        t.status = Status::Inconclusive;
        t.min_lb = f64::NEG_INFINITY;
        return t;
    }
    t.boxes = 1;
    t.min_lb = v.lo();
    if v.lo() >= 0.0 {
        t.status = Status::Verified;
    } else if v.hi() < 0.0 {
        t.status = Status::Failed;
        t.witness = Some(Witness {
            point: None,
            upper: v.hi(),
        });
    } else {
        t.status = Status::Inconclusive;
    }
    t
}

struct Stamp<'a> {
    id: InequalityId,
    alpha: u32,
    domain: String,
    anchor: &'a str,
}

fn stamp(s: Stamp<'_>, t: Tally, policy: &BnbPolicy, start: u64) -> Certificate {
    Certificate {
        inequality_id: s.id,
        alpha: s.alpha,
        domain: s.domain,
        status: t.status,
        boxes_processed: t.boxes,
        max_depth: t.depth,
        min_lower_bound: t.min_lb,
        wall_time_ms: policy.now().saturating_sub(start),
        witness: t.witness,
        anchor: String::from(s.anchor),
        policy: *policy,
    }
}

/// Certifies `f >= 0` on `domain` by bisection.
pub fn prove_nonneg<F: Fn(Interval) -> Interval>(f: F, domain: Interval, policy: &BnbPolicy) -> Certificate {
    let start = policy.now();
    let t = bnb(&f, domain, policy);
    stamp(
        Stamp {
            id: InequalityId::Expression,
            alpha: 0,
            domain: format!("[{:?}, {:?}]", domain.lo(), domain.hi()),
            anchor: "f(x) >= 0",
        },
        t,
        policy,
        start,
    )
}

fn ia(x: f64) -> Interval {
    Interval::point(x)
}

fn pow2(k: u32) -> Interval {
    ia(2.0).pow_int(k)
}

fn one_over(x: Interval) -> Interval {
    x.recip().expect("denominator bounded away from 0")
}

/// `F(n)` for any integer.
fn fa(c: &AuxCoefficients, n: i64) -> Interval {
    c.f_n[n.unsigned_abs() as usize]
}

/// `F'(n)` for any integer; `F'` is odd.
fn dfa(c: &AuxCoefficients, n: i64) -> Interval {
    let v = c.df_n[n.unsigned_abs() as usize];
    if n < 0 {
        -v
    } else {
        v
    }
}

/// `sum_{k >= 0} 1/(a + k)^2` for `a >= 1`, between the Euler-Maclaurin
/// partial sums `1/a + 1/(2a^2) + 1/(6a^3)` and that minus `1/(30 a^5)`.
fn inv_sq_tail(a: Interval) -> Interval {
    let r = one_over(a);
    let s1 = r + 0.5 * r.sqr() + r.pow_int(3).div_f64(6.0);
    let s2 = s1 - r.pow_int(5).div_f64(30.0);
    Interval::new(s2.lo(), s1.hi())
}

fn check_range(alpha: u32, ok: bool, what: &str) -> Result<(), CertifyError> {
    if ok {
        Ok(())
    } else {
        Err(precondition(format!("{what} is not defined for alpha = {alpha}")))
    }
}

fn even_alpha(alpha: u32) -> Result<(), CertifyError> {
    validate_alpha(alpha).map_err(CertifyError::from)
}

const ANCHOR_T: &str = "(1/2)(1 - 2 sum_{n>=1} F(n)) - (1/pi) sum_{n>=2} |F'(n)| >= 0";
const ANCHOR_T_LARGE: &str =
    "(1/2)(1 - 1/(a-2) - (2/a)(a+1)/(2^a (a-1))) - (1/pi)(a+2)/(a 2^(1+a)) >= 0";
const ANCHOR_L: &str = "sum_n n^3 F'(n)(-2/3 + 4 R(pi n)) - sum_n 2 n^2 F(n) >= 0";
const ANCHOR_L_LARGE: &str =
    "(1 - 1/(2a-4))(2/3 - 4 R(pi)) - 4(a-1)/(2^(a-2)(2a-5)(a-3)) - 2/(a-2) >= 0";
const ANCHOR_L4: &str = "s^4 n^4 - 4 >= 0 for n >= 1, so 1 - F(n) >= 4/5";
const ANCHOR_W: &str =
    "32 S3(2w) - 5 sinc(w)^2 >= 0 on [0, pi/2]; 8w - 4 sin(2w) - 5w sin(w)^2 >= 3w - 4 >= 3 pi/2 - 4 > 0 for w >= pi/2";
const ANCHOR_PSI4: &str = "sum_n (F(x) - F(n) - F'(n)(x-n))/(x-n)^2 >= 0 on [0, 9]; \
     -sum_n (3 n^2 F(n) + n^3 F'(n)) >= 10/81 + 1/81 + 5 F(9)/2 for x >= 9";
const ANCHOR_ETA0: &str =
    "4(F(1/2) - 1) + sum_{n!=0} (F(1/2) - F(n))/n^2 >= sum_{n!=0} n F'(n)/(1/4 - n^2); F(1/2) >= 2/a";
const ANCHOR_ETA0_LARGE: &str = "-0.04 + 0.94 pi^2/3 >= 4a/(3a-6) + (a+1)/(2^a (a-1))";
const ANCHOR_ETA1: &str = "(F(1+t) - F(1) - t F'(1))/t^2 + sum_{n!=0} F(1+t)/(n-t)^2 \
     >= 1/(1+t)^2 + F(1)/(2+t)^2 - F'(1)/(2+t) + sum_{|n|>=2} (F(n)/(1+t-n)^2 + F'(n)/(1+t-n))";
const ANCHOR_ETA1_LARGE: &str = "closed bounds for t in [0, 1/2] and [-1/2, 0) with |B(a,t)| <= 10/2^a";
const ANCHOR_ETA2: &str = "sum_{n != round(x)} (F(n)/(x-n)^2 + F'(n)/(x-n)) <= 0 on [1.5, 10]; \
     sum_n (3n^2 F + n^3 F') + 16/(100 s^a) + (10 F(1) + 2 F'(1))/99 \
     + sum_{n>=2} |10 n^4 F + 2 n^5 F'|/5 + (8a+2)/10^(a-2) <= 0 for x >= 10";
const ANCHOR_FAR: &str = "-1 + 7/(2a-4) + 2^(4-a) + (11/(2a-4) - 1)/1.25 + 16/(2.25 (2a-5)) \
     + 4/(1.5 2^(a-4)) <= -(8a+2)/2^(a-2)";

/// `T(a)` for `a` in `{4, 6, 8, 10}`; larger exponents use the closed bound.
pub fn certify_t(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    let alpha = c.alpha();
    if alpha >= 12 {
        return certify_t_large(alpha, policy);
    }
    even_alpha(alpha)?;
    let start = policy.now();
    let t = constant(t_value(c), policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::TAlpha,
            alpha,
            domain: String::from("xi in [0, 1/2] (single constant)"),
            anchor: ANCHOR_T,
        },
        t,
        policy,
        start,
    ))
}

/// `T(a) = (1/2)(1 - 2 sum_{n>=1} F(n)) - (1/pi) sum_{n>=2} |F'(n)|`.
pub fn t_value(c: &AuxCoefficients) -> Interval {
    let n = c.n as usize;
    let sf: Interval = c.f_n[1..=n].iter().rev().copied().sum::<Interval>() + c.tail_f;
    let sd: Interval = c.df_n[2..=n].iter().rev().map(|&d| -d).sum::<Interval>() - c.tail_df;
    0.5 * (1.0 - 2.0 * sf) - sd * one_over(Interval::PI)
}

pub fn certify_t_large(alpha: u32, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 12, "the closed bound for T")?;
    let start = policy.now();
    let a = ia(alpha as f64);
    let inner = 1.0 - one_over(a - 2.0) - (2.0 * one_over(a)) * (a + 1.0) * one_over(pow2(alpha) * (a - 1.0));
    let v = 0.5 * inner - (a + 2.0) * one_over(Interval::PI * a * pow2(alpha + 1));
    let t = constant(v, policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::TAlpha,
            alpha,
            domain: String::from("xi in [0, 1/2] (closed bound)"),
            anchor: ANCHOR_T_LARGE,
        },
        t,
        policy,
        start,
    ))
}

/// `L(a)` for `a` in `{6, 8, 10}`; larger exponents use the closed bound.
pub fn certify_l(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    let alpha = c.alpha();
    if alpha >= 12 {
        return certify_l_large(alpha, policy);
    }
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 6, "L (use the w-inequality route)")?;
    let start = policy.now();
    let t = constant(l_value(c), policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::LAlpha,
            alpha,
            domain: String::from("xi in [1/2, 1] (single constant)"),
            anchor: ANCHOR_L,
        },
        t,
        policy,
        start,
    ))
}

/// `L(a) = sum_n n^3 F'(n)(-2/3 + 4 R(pi n)) - sum_n 2 n^2 F(n)`.
pub fn l_value(c: &AuxCoefficients) -> Interval {
    l_value_with(c, |k| (Interval::PI * k).remainder_r())
}

/// `L(a)` with `R(pi n)` supplied by the caller.
pub fn l_value_with<R: Fn(Interval) -> Interval>(c: &AuxCoefficients, r: R) -> Interval {
    let mut acc = Interval::ZERO;
    for k in (1..=c.n).rev() {
        let kf = ia(k as f64);
        let i = k as usize;
        let a = kf.pow_int(3) * c.df_n[i] * (4.0 * r(kf) - Interval::ratio(2.0, 3.0));
        acc = acc + a - 2.0 * kf.sqr() * c.f_n[i];
    }
    // for k > N: |-2/3 + 4 R(pi k)| <= 4/(pi k)^2 + 4/(pi k)^3 and n^3 F' <= 0
    let ip = one_over(Interval::PI);
    let b1 = 4.0 * ip.sqr() * (-c.tail_pdf(1)) + 4.0 * ip.pow_int(3) * (-c.tail_df);
    let tail = Interval::new(0.0, b1.hi()) - 2.0 * c.tail_pf(2);
    2.0 * (acc + tail)
}

pub fn certify_l_large(alpha: u32, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 12, "the closed bound for L")?;
    let start = policy.now();
    let a = ia(alpha as f64);
    let r = Interval::PI.remainder_r();
    let head = (1.0 - one_over(2.0 * a - 4.0)) * (Interval::ratio(2.0, 3.0) - 4.0 * r);
    let mid = 4.0 * (a - 1.0) * one_over(pow2(alpha - 2) * (2.0 * a - 5.0) * (a - 3.0));
    let v = head - mid - 2.0 * one_over(a - 2.0);
    let t = constant(v, policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::LAlpha,
            alpha,
            domain: String::from("xi in [1/2, 1] (closed bound)"),
            anchor: ANCHOR_L_LARGE,
        },
        t,
        policy,
        start,
    ))
}

/// The exponent-4 inequality behind `psi_hat >= 0` on `[1/2, 1]`.
pub fn certify_w_inequality(policy: &BnbPolicy) -> Certificate {
    let start = policy.now();
    let half_pi = Interval::new(0.0, Interval::PI.hi() * 0.5);
    let a = bnb(&|w: Interval| 32.0 * (2.0 * w).s3_kernel() - 5.0 * w.sinc().sqr(), half_pi, policy);
    let upper = Interval::new(Interval::PI.lo() * 0.5, Interval::PI.hi() * 2.0);
    let b = bnb(
        &|w: Interval| 5.0 * w * w.cos().sqr() + 4.0 * (1.0 - (2.0 * w).sin()),
        upper,
        policy,
    );
    let c = constant(1.5 * Interval::PI - 4.0, policy);
    stamp(
        Stamp {
            id: InequalityId::WInequality,
            alpha: 4,
            domain: String::from("w in [0, pi/2] and [pi/2, 2 pi]; w >= pi/2 via 3 pi/2 - 4"),
            anchor: ANCHOR_W,
        },
        a.merge(b).merge(c),
        policy,
        start,
    )
}

/// `1 - F_4(n) >= 4/5` for `n >= 1`, checked as `s^4 - 4 >= 0`.
fn certify_alpha4_reduction(c: &AuxCoefficients, policy: &BnbPolicy) -> Certificate {
    let start = policy.now();
    let t = constant(c.ctx.s_pow_alpha - 4.0, policy);
    stamp(
        Stamp {
            id: InequalityId::LAlpha,
            alpha: 4,
            domain: String::from("n >= 1 (reduction to the w-inequality)"),
            anchor: ANCHOR_L4,
        },
        t,
        policy,
        start,
    )
}

/// `psi_hat >= 0`: `[0, 1/2]` through `T`, `[1/2, 1]` through `L` or, for
/// `a = 4`, through the w-inequality and `1 - F_4(n) >= 4/5`.
pub fn certify_psihat_nonneg(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Vec<Certificate>, CertifyError> {
    let alpha = c.alpha();
    even_alpha(alpha)?;
    let t = certify_t(c, policy)?;
    if alpha == 4 {
        Ok(vec![t, certify_w_inequality(policy), certify_alpha4_reduction(c, policy)])
    } else {
        Ok(vec![t, certify_l(c, policy)?])
    }
}

/// `(F(x) - F(n) - F'(n)(x - n))/(x - n)^2`. Within distance 1/4 of `n`
/// the Lagrange form `F''(s)/2`, `s` in `hull(x, n)`, is used, intersected
/// with the quotient when `n` is outside `x`; `n = 0` uses
/// `(F(x) - 1)/x^2 = -s^a x^(a-2) F(x)`.
pub fn mean_value_l_term(ctx: &PotentialContext, x: Interval, n: i64) -> Interval {
    let nf = ia(n as f64);
    l_term(ctx, x, ctx.f(x), n, ctx.f(nf), ctx.df(nf))
}

fn l_term(ctx: &PotentialContext, x: Interval, fx: Interval, n: i64, f_n: Interval, df_n: Interval) -> Interval {
    if n == 0 {
        return ctx.f_minus_one_over_sq(x);
    }
    let nf = n as f64;
    let d = x - nf;
    let direct = || (fx - f_n - df_n * d).div(d.sqr()).expect("n outside x");
    if d.mig() >= 0.25 {
        direct()
    } else {
        let mv = 0.5 * ctx.d2f(x.hull(ia(nf)));
        if d.mig() > 0.0 {
            narrow(mv, direct())
        } else {
            mv
        }
    }
}

/// Intersection of two enclosures of the same quantity.
fn narrow(a: Interval, b: Interval) -> Interval {
    a.intersect(b).unwrap_or(a)
}

/// `sum_{n in Z} L_a(x, n)` with the remainder over `|n| > N` enclosed.
pub fn l_sum(c: &AuxCoefficients, x: Interval) -> Interval {
    let ctx = &c.ctx;
    let fx = ctx.f(x);
    let n = c.n as i64;
    let mut acc = Interval::ZERO;
    for k in (1..=n).rev() {
        acc = acc + l_term(ctx, x, fx, k, fa(c, k), dfa(c, k)) + l_term(ctx, x, fx, -k, fa(c, -k), dfa(c, -k));
    }
    acc = acc + l_term(ctx, x, fx, 0, Interval::ONE, Interval::ZERO);
    // |n| > N, with 0 <= x < N: F(x) sum 1/(x-n)^2 is enclosed directly, the
    // F(n) part lies in [-2 sum F/(N+1-x)^2, 0] and the F' part, paired as
    // 2n F'(n)/(n^2 - x^2), in [2 sum n F'/((N+1)^2 - x^2), 0]
    let m = (n + 1) as f64;
    let xa = x.abs();
    let inv = inv_sq_tail(m - xa) + inv_sq_tail(m + xa);
    let pf = 2.0 * c.tail_f * one_over((m - xa).sqr());
    let pd = 2.0 * c.tail_pdf(1) * one_over(m * m - xa.sqr());
    let tail = fx * inv + Interval::new(pd.lo() - pf.hi(), 0.0);
    acc + tail
}

/// `psi_4 <= F_4` on `[0, 9]` by subdivision, and the constant covering `x >= 9`.
pub fn certify_psi4_le_f4(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    check_range(c.alpha(), c.alpha() == 4, "psi_4 <= F_4")?;
    let start = policy.now();
    let a = bnb(&|x: Interval| l_sum(c, x), Interval::new(0.0, 9.0), policy);
    let lhs = -(3.0 * c.moment_f(2) + c.moment_df(3));
    let rhs = Interval::ratio(11.0, 81.0) + 2.5 * c.ctx.f(ia(9.0));
    let b = constant(lhs - rhs, policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::Psi4LeF4,
            alpha: 4,
            domain: String::from("x in [0, 9]; x >= 9 reduced to a constant by the analytic argument (assumed)"),
            anchor: ANCHOR_PSI4,
        },
        a.merge(b),
        policy,
        start,
    ))
}

/// The constant inequality that covers `x` in `[0, 1/2]`.
pub fn certify_eta0(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    let alpha = c.alpha();
    if alpha >= 12 {
        return certify_eta0_large(alpha, policy);
    }
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 6, "eta0")?;
    let start = policy.now();
    let ctx = &c.ctx;
    let fh = ctx.f(ia(0.5));
    let mut sl = Interval::ZERO;
    let mut sr = Interval::ZERO;
    for k in (1..=c.n).rev() {
        let kf = ia(k as f64);
        let i = k as usize;
        sl = sl + (fh - c.f_n[i]) * one_over(kf.sqr());
        sr = sr + kf * c.df_n[i] * one_over(0.25 - kf.sqr());
    }
    let m = (c.n + 1) as f64;
    let tl = fh * crate::potential::zeta_tail(2, c.n) - Interval::new(0.0, (c.tail_f * one_over(ia(m * m))).hi());
    // k F'(k)/(1/4 - k^2) >= 0, bounded by |sum k F'|/((N+1)^2 - 1/4)
    let tr = Interval::new(0.0, (-c.tail_pdf(1) * one_over(ia(m * m) - 0.25)).hi());
    let lhs = 4.0 * (fh - 1.0) + 2.0 * (sl + tl);
    let rhs = 2.0 * (sr + tr);
    let a = constant(lhs - rhs, policy);
    let b = constant(fh - 2.0 * one_over(ia(alpha as f64)), policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::Eta0,
            alpha,
            domain: String::from("x in [0, 1/2] (reduced to a constant)"),
            anchor: ANCHOR_ETA0,
        },
        a.merge(b),
        policy,
        start,
    ))
}

pub fn certify_eta0_large(alpha: u32, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 12, "the closed bound for eta0")?;
    let start = policy.now();
    let a = ia(alpha as f64);
    let lhs = -0.04 + 0.94 * Interval::PI.sqr().div_f64(3.0);
    let rhs = 4.0 * a * one_over(3.0 * a - 6.0) + (a + 1.0) * one_over(pow2(alpha) * (a - 1.0));
    let t = constant(lhs - rhs, policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::Eta0,
            alpha,
            domain: String::from("x in [0, 1/2] (closed bound)"),
            anchor: ANCHOR_ETA0_LARGE,
        },
        t,
        policy,
        start,
    ))
}

/// Left minus right side of the `x = 1 + t` inequality.
pub fn eta1_gap(c: &AuxCoefficients, t: Interval) -> Interval {
    let ctx = &c.ctx;
    let x = 1.0 + t;
    let fx = ctx.f(x);
    let direct = || (fx - ctx.f1 - t * ctx.df1).div(t.sqr()).expect("0 outside t");
    let q = if t.mig() >= 0.25 {
        direct()
    } else if t.mig() > 0.0 {
        narrow(0.5 * ctx.d2f(x.hull(Interval::ONE)), direct())
    } else {
        0.5 * ctx.d2f(x.hull(Interval::ONE))
    };
    let n = c.n as i64;
    let mut s = Interval::ZERO;
    let mut b = Interval::ZERO;
    for k in (1..=n).rev() {
        let kf = k as f64;
        s = s + one_over((kf - t).sqr()) + one_over((kf + t).sqr());
        if k >= 2 {
            for j in [k, -k] {
                let d = x - j as f64;
                b = b + fa(c, j) * one_over(d.sqr()) + dfa(c, j) * one_over(d);
            }
        }
    }
    let m = (n + 1) as f64;
    s = s + inv_sq_tail(m - t) + inv_sq_tail(m + t);
    // |1 + t - n| >= n - 3/2 >= N - 1/2 for |n| > N
    let g = ia(n as f64 - 0.5);
    let bt = 2.0 * c.tail_f * one_over(g.sqr()) - 2.0 * c.tail_df * one_over(g);
    b = b + Interval::new(-bt.hi(), bt.hi());
    let lhs = q + fx * s;
    let rhs = one_over(x.sqr()) + ctx.f1 * one_over((2.0 + t).sqr()) - ctx.df1 * one_over(2.0 + t) + b;
    lhs - rhs
}

/// The `x = 1 + t` inequality by subdivision of `t` in `[-1/2, 1/2]`, for
/// `6 <= a <= 1000`; larger exponents use the closed bounds.
pub fn certify_eta1(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    let alpha = c.alpha();
    if alpha > 1000 {
        return certify_eta1_large(alpha, policy);
    }
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 6, "eta1")?;
    let start = policy.now();
    let t = bnb(&|t: Interval| eta1_gap(c, t), Interval::new(-0.5, 0.5), policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::Eta1,
            alpha,
            domain: String::from("t in [-1/2, 1/2], x = 1 + t"),
            anchor: ANCHOR_ETA1,
        },
        t,
        policy,
        start,
    ))
}

/// Closed bounds for `a > 1000`, using `s^a` in `[2a - 5, 2a - 3]`,
/// `F(1) <= 1/(2a - 4)` and `-F'(1) <= a/(2a - 4)`.
pub fn certify_eta1_large(alpha: u32, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha > 1000, "the closed bounds for eta1")?;
    let start = policy.now();
    let a = ia(alpha as f64);
    let f1 = one_over(2.0 * a - 4.0);
    let d1 = a * f1;
    let tiny = 10.0 * one_over(pow2(alpha));
    let ln50 = ia(50.0).log().expect("positive");
    // t in [0, 1/2] with a F(1+t) >= 1/100: F''/2 against the supremum of the right side
    let curv = 0.5 * (4.0 * a * 0.01).div_f64(9.0) * (1.0 - f1) * (1.0 - one_over(a - 2.0));
    let c1 = constant(curv - (1.0 + 0.25 * f1 + 0.5 * d1 + tiny), policy);
    // t in [log(50)/a, 1/10] and [1/10, 1/2] with a F(1+t) < 1/100
    let lead = 1.0 - f1;
    let c2 = bnb(
        &|t: Interval| {
            one_over(t) * (lead * one_over(2.0 + t) - one_over(ln50))
                - one_over((1.0 + t).sqr())
                - one_over(a * (2.0 + t).sqr())
                - tiny
        },
        Interval::new((ln50 * one_over(a)).lo(), 0.1),
        policy,
    );
    let c3 = bnb(
        &|t: Interval| {
            lead * one_over(t * (2.0 + t))
                - one_over((1.0 + t).sqr())
                - one_over(a * t.sqr())
                - one_over(a * (2.0 + t).sqr())
                - tiny
        },
        Interval::new(0.1, 0.5),
        policy,
    );
    // t in [-1/2, 0) with F(1+t) < 0.48
    let c4 = constant(0.0052 * a - (4.0 + Interval::ratio(4.0, 9.0) * f1 + Interval::ratio(2.0, 3.0) * d1 + tiny), policy);
    // t in [-1/2, 0) with F(1+t) >= 0.48
    let c5 = constant(0.5 - f1 - 0.5 * d1, policy);
    let rhs_hi = |t: Interval| one_over((1.0 + t).sqr()) + Interval::ratio(4.0, 9.0) * one_over(a) + d1 * one_over(2.0 + t) + tiny;
    let c6 = constant(0.48 * Interval::PI.sqr().div_f64(3.0) - rhs_hi(ia(-0.1)), policy);
    let c7 = bnb(
        &|t: Interval| 0.999 * (one_over((1.0 + t).sqr()) + one_over((1.0 - t).sqr())) - rhs_hi(t),
        Interval::new(-0.5, -0.1),
        policy,
    );
    let f09 = one_over(1.0 + (2.0 * a - 3.0) * ia(0.9).pow_int(alpha));
    let c8 = constant(f09 - 0.999, policy);
    let all = [c2, c3, c4, c5, c6, c7, c8].into_iter().fold(c1, Tally::merge);
    Ok(stamp(
        Stamp {
            id: InequalityId::Eta1,
            alpha,
            domain: String::from("t in [-1/2, 1/2], x = 1 + t (closed bounds)"),
            anchor: ANCHOR_ETA1_LARGE,
        },
        all,
        policy,
        start,
    ))
}

/// `-sum_{n != k} (F(n)/(x-n)^2 + F'(n)/(x-n))` with `k` the integer nearest `x`.
pub fn eta2_gap(c: &AuxCoefficients, x: Interval, k: i64) -> Interval {
    let n = c.n as i64;
    let mut acc = Interval::ZERO;
    for j in (1..=n).rev() {
        for i in [j, -j] {
            if i == k {
                continue;
            }
            let d = x - i as f64;
            acc = acc + fa(c, i) * one_over(d.sqr()) + dfa(c, i) * one_over(d);
        }
    }
    if k != 0 {
        acc = acc + one_over(x.sqr());
    }
    // |n| > N: F(n)/(x-n)^2 terms in [0, 2 sum F/(N+1-x)^2]; paired F' terms
    // -2n F'(n)/(n^2 - x^2) in [0, 2 |sum n F'|/((N+1)^2 - x^2)]
    let m = (n + 1) as f64;
    let xa = x.abs();
    let hi = 2.0 * c.tail_f * one_over((m - xa).sqr()) - 2.0 * c.tail_pdf(1) * one_over(m * m - xa.sqr());
    -(acc + Interval::new(0.0, hi.hi()))
}

fn far_field_small(c: &AuxCoefficients) -> Result<Interval, CertifyError> {
    let alpha = c.alpha();
    let a = ia(alpha as f64);
    let ctx = &c.ctx;
    // beyond N the terms 10 n^4 F + 2 n^5 F' = n^4 F (10 - 2a(1 - F)) are negative
    let last = c.f_n[c.n as usize];
    if !(last.hi() < 1.0 - 5.0 / alpha as f64) {
        return Err(precondition(format!("far-field tail sign for alpha = {alpha}")));
    }
    let mut abs_sum = Interval::ZERO;
    for k in (2..=c.n).rev() {
        let kf = ia(k as f64);
        let i = k as usize;
        abs_sum = abs_sum + (10.0 * kf.pow_int(4) * c.f_n[i] + 2.0 * kf.pow_int(5) * c.df_n[i]).abs();
    }
    abs_sum = abs_sum - (10.0 * c.tail_pf(4) + 2.0 * c.tail_pdf(5));
    let moment = 3.0 * c.moment_f(2) + c.moment_df(3);
    let lhs = moment
        + 16.0 * one_over(100.0 * ctx.s_pow_alpha)
        + (10.0 * ctx.f1 + 2.0 * ctx.df1).div_f64(99.0)
        + abs_sum.div_f64(5.0)
        + (8.0 * a + 2.0) * one_over(ia(10.0).pow_int(alpha - 2));
    Ok(-lhs)
}

/// `x >= 3/2`: subdivision of `[1.5, 10]` piecewise in the nearest integer,
/// plus the constant covering `x >= 10`; for `a >= 16` the closed bound.
pub fn certify_eta_ge2(c: &AuxCoefficients, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    let alpha = c.alpha();
    if alpha >= 16 {
        return certify_far_field_large(alpha, policy);
    }
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 6, "eta_ge2")?;
    let start = policy.now();
    let mut t = Tally::empty();
    for k in 2..=10i64 {
        let lo = (k as f64 - 0.5).max(1.5);
        let hi = (k as f64 + 0.5).min(10.0);
        t = t.merge(bnb(&|x: Interval| eta2_gap(c, x, k), Interval::new(lo, hi), policy));
    }
    t = t.merge(constant(far_field_small(c)?, policy));
    Ok(stamp(
        Stamp {
            id: InequalityId::EtaGe2,
            alpha,
            domain: String::from("x in [1.5, 10] split at half-integers; x >= 10 reduced to a constant"),
            anchor: ANCHOR_ETA2,
        },
        t,
        policy,
        start,
    ))
}

/// The closed far-field bound for `a >= 16`, covering every `x >= 3/2`.
pub fn certify_far_field_large(alpha: u32, policy: &BnbPolicy) -> Result<Certificate, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha >= 16, "the closed far-field bound")?;
    let start = policy.now();
    let a = ia(alpha as f64);
    let p4 = one_over(pow2(alpha - 4));
    let lhs = -1.0 + 7.0 * one_over(2.0 * a - 4.0) + p4 + (11.0 * one_over(2.0 * a - 4.0) - 1.0).div_f64(1.25)
        + 16.0 * one_over(2.25 * (2.0 * a - 5.0))
        + 4.0 * p4.div_f64(1.5);
    let rhs = -(8.0 * a + 2.0) * one_over(pow2(alpha - 2));
    let t = constant(rhs - lhs, policy);
    Ok(stamp(
        Stamp {
            id: InequalityId::FarFieldConst,
            alpha,
            domain: String::from("x >= 1.5 (closed bound)"),
            anchor: ANCHOR_FAR,
        },
        t,
        policy,
        start,
    ))
}

/// Exponents covered by the interval routes of [`certify_all`].
pub const CERTIFY_MENU: [u32; 6] = [4, 6, 8, 10, 12, 14];

/// Solves for `s_a`, builds the coefficient tables and runs every check
/// needed for `psi_hat >= 0` and `psi <= F`.
pub fn certify_all(alpha: u32, policy: &BnbPolicy) -> Result<Vec<Certificate>, CertifyError> {
    even_alpha(alpha)?;
    check_range(alpha, alpha <= 14, "certify_all")?;
    let solved = solve_s_alpha(alpha, DEFAULT_TOL)?;
    let ctx = if alpha == 4 {
        let exact = PotentialContext::alpha4_exact();
        if !solved.s_alpha.overlaps(exact.s_alpha) {
            return Err(precondition(String::from("solved s_4 does not enclose sqrt 2")));
        }
        exact
    } else {
        solved
    };
    let c = AuxCoefficients::new(ctx, CERT_N);
    let mut out = certify_psihat_nonneg(&c, policy)?;
    if alpha == 4 {
        out.push(certify_psi4_le_f4(&c, policy)?);
    } else {
        out.push(certify_eta0(&c, policy)?);
        out.push(certify_eta1(&c, policy)?);
        out.push(certify_eta_ge2(&c, policy)?);
    }
    Ok(out)
}
