//! The potential family `f_a(x) = 1/(1 + x^a)`, its rescaling
//! `F_a(x) = f_a(s_a x)`, lattice energies and the optimal spacing `s_a`.
//!
//! Remainders of the lattice sums are enclosed on both sides. For `u > 0`,
//! `1/(1+u)` lies in `[1/u - 1/u^2, 1/u]`, which turns every tail into a
//! combination of zeta tails `sum_{n>N} n^-b`, enclosed by Euler-Maclaurin
//! partial sums.

use core::fmt;

use crate::interval::Interval;

/// Truncation used inside the spacing solver.
pub const SOLVE_N: u64 = 256;
/// Default truncation for energies.
pub const ENERGY_N: u64 = 64;
/// Default truncation for residual checks.
pub const RESIDUAL_N: u64 = 128;
/// Default width target for `s_a`.
pub const DEFAULT_TOL: f64 = 1e-12;

const SIGN_CELLS: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialError {
    /// Exponent is odd or below 4.
    InvalidAlpha(u32),
    /// A routine restricted to large exponents was called below its range.
    AlphaOutOfRange { alpha: u32, min: u32 },
    /// The bracket did not show exactly one sign change of the energy derivative.
    Ambiguous { candidates: usize },
    /// Thin-point evaluations could not separate the root to the requested width.
    Unresolved { width: f64 },
    /// Derivative form evaluated on a box containing 0.
    Domain,
}

impl fmt::Display for PotentialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialError::InvalidAlpha(a) => write!(f, "alpha must be an even integer >= 4, got {a}"),
            PotentialError::AlphaOutOfRange { alpha, min } => {
                write!(f, "alpha = {alpha} is below the supported range (>= {min})")
            }
            PotentialError::Ambiguous { candidates } => {
                write!(f, "ambiguous sign-change count ({candidates} candidate cells)")
            }
            PotentialError::Unresolved { width } => {
                write!(f, "root enclosure stalled at width {width:e}")
            }
            PotentialError::Domain => f.write_str("derivative form requested on a box containing 0"),
        }
    }
}

pub fn validate_alpha(alpha: u32) -> Result<(), PotentialError> {
    if alpha >= 4 && alpha % 2 == 0 {
        Ok(())
    } else {
        Err(PotentialError::InvalidAlpha(alpha))
    }
}

/// `1/(1 + x^a)`.
pub fn f_alpha(alpha: u32, x: Interval) -> Interval {
    let d = 1.0 + x.pow_int(alpha);
    let r = d.recip().expect("1 + x^a >= 1");
    Interval::new(r.lo().max(0.0), r.hi().min(1.0))
}

/// Lower and upper bounds on `sum_{n > n0} n^-beta`.
///
/// With `g(x) = x^-beta` and `M = n0 + 1`, Euler-Maclaurin partial sums
/// alternate around the tail because every derivative of `g` has a fixed
/// sign: `S1 = int_M g + g(M)/2 - g'(M)/12` is above it and
/// `S2 = S1 + g'''(M)/720` below. The cruder trapezoid and midpoint
/// comparisons are intersected in as well.
pub fn zeta_tail(beta: u32, n0: u64) -> Interval {
    assert!(beta >= 2, "zeta tail needs beta > 1");
    let m = Interval::point((n0 + 1) as f64);
    let h = Interval::point(n0 as f64 + 0.5);
    let b = beta as f64;
    let inv = m.recip().unwrap();
    let base = m.pow_int(beta - 1).recip().unwrap();
    let integral = base.div_f64(b - 1.0);
    let s0 = integral + (base * inv).div_f64(2.0);
    let s1 = s0 + (base * inv.sqr()) * Interval::ratio(b, 12.0);
    let c3 = Interval::point(b) * (b + 1.0) * (b + 2.0);
    let s2 = s1 - (base * inv.pow_int(4)) * c3.div_f64(720.0);
    let mid = h.pow_int(beta - 1).recip().unwrap().div_f64(b - 1.0);
    let lo = s0.lo().max(s2.lo());
    let hi = mid.hi().min(s1.hi());
    Interval::new(lo, hi)
}

/// Encloses `sum_{n > n0} n^p / (1 + c n^a)`.
pub fn tail_power_f(alpha: u32, c: Interval, p: u32, n0: u64) -> Interval {
    let a = c.recip().expect("positive scale");
    let main = a * zeta_tail(alpha - p, n0);
    let corr = a.sqr() * zeta_tail(2 * alpha - p, n0);
    main - Interval::new(0.0, corr.hi())
}

/// Encloses `sum_{n > n0} n^p F'(n)` where `F(x) = 1/(1 + c x^a)`.
pub fn tail_power_df(alpha: u32, c: Interval, p: u32, n0: u64) -> Interval {
    // n F'(n) = -a u/(1+u)^2 with u = c n^a, and u/(1+u)^2 in [1/u - 2/u^2, 1/u]
    let a = c.recip().expect("positive scale");
    let al = alpha as f64;
    let main = (a * zeta_tail(alpha + 1 - p, n0)) * (-al);
    let corr = (a.sqr() * zeta_tail(2 * alpha + 1 - p, n0)) * (2.0 * al);
    main + Interval::new(0.0, corr.hi())
}

/// The rescaled potential `F_a(x) = 1/(1 + s_a^a x^a)` with its constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialContext {
    pub alpha: u32,
    pub s_alpha: Interval,
    pub s_pow_alpha: Interval,
    pub f1: Interval,
    pub df1: Interval,
}

impl PotentialContext {
    /// Context for an arbitrary spacing enclosure `s`.
    pub fn from_spacing(alpha: u32, s: Interval) -> PotentialContext {
        Self::from_parts(alpha, s, s.pow_int(alpha))
    }

    fn from_parts(alpha: u32, s: Interval, spow: Interval) -> PotentialContext {
        let f1 = (1.0 + spow).recip().unwrap();
        let df1 = -(alpha as f64) * spow * f1.sqr();
        PotentialContext {
            alpha,
            s_alpha: s,
            s_pow_alpha: spow,
            f1,
            df1,
        }
    }

    /// `a = 4` with `s_4 = sqrt 2` and `s_4^4 = 4` exactly.
    pub fn alpha4_exact() -> PotentialContext {
        let s = Interval::point(2.0).sqrt().unwrap();
        Self::from_parts(4, s, Interval::point(4.0))
    }

    /// Same context with `F_a(1)` replaced; used for perturbation checks.
    pub fn with_f1(mut self, f1: Interval) -> PotentialContext {
        self.f1 = f1;
        self
    }

    fn u(&self, x: Interval) -> Interval {
        self.s_pow_alpha * x.pow_int(self.alpha)
    }

    /// `F_a(x)`.
    pub fn f(&self, x: Interval) -> Interval {
        let r = (1.0 + self.u(x)).recip().unwrap();
        Interval::new(r.lo().max(0.0), r.hi().min(1.0))
    }

    /// `F_a'(x) = -a s^a x^(a-1) F_a(x)^2`, valid on every box.
    pub fn df(&self, x: Interval) -> Interval {
        let al = self.alpha as f64;
        let r = -al * self.s_pow_alpha * x.pow_int(self.alpha - 1) * self.f(x).sqr();
        if x.lo() >= 0.0 {
            Interval::new(r.lo(), r.hi().min(0.0))
        } else {
            r
        }
    }

    /// `F_a'(x) = -a F_a(x)(1 - F_a(x))/x`; refuses boxes containing 0.
    pub fn df_quotient(&self, x: Interval) -> Result<Interval, PotentialError> {
        let fx = self.f(x);
        let num = -(self.alpha as f64) * fx * (1.0 - fx);
        num.div(x).map_err(|_| PotentialError::Domain)
    }

    /// `F_a''(x) = a F (s^a x^(a-2) F) (a (1 - 2F) + 1)`.
    pub fn d2f(&self, x: Interval) -> Interval {
        let al = self.alpha as f64;
        let fx = self.f(x);
        let q = self.s_pow_alpha * x.pow_int(self.alpha - 2) * fx;
        al * fx * q * (al * (1.0 - 2.0 * fx) + 1.0)
    }

    /// `(F_a(x) - 1)/x^2 = -s^a x^(a-2) F_a(x)`.
    pub fn f_minus_one_over_sq(&self, x: Interval) -> Interval {
        -(self.s_pow_alpha * x.pow_int(self.alpha - 2) * self.f(x))
    }

    /// `F_a(n) + n F_a'(n) = (1 - (a-1)u)/(1+u)^2` with `u = s^a n^a`.
    pub fn g(&self, n: Interval) -> Interval {
        let u = self.u(n);
        let num = 1.0 - ((self.alpha - 1) as f64) * u;
        num.div((1.0 + u).sqr()).unwrap()
    }
}

/// Head and remainder of `sum_n t f_a(t n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeEnergyTerms {
    pub truncation_n: u64,
    /// Partial sum over `|n| <= N`.
    pub head: Interval,
    /// Enclosure of the remainder over `|n| > N`.
    pub tail: Interval,
}

impl LatticeEnergyTerms {
    pub fn total(&self) -> Interval {
        self.head + self.tail
    }
}

/// `E_a(t) = sum_n t f_a(t n)`.
///
/// # Panics
/// If `t.lo() <= 0` or `n < 2`.
pub fn lattice_energy(alpha: u32, t: Interval, n: u64) -> LatticeEnergyTerms {
    assert!(t.lo() > 0.0 && n >= 2);
    let ta = t.pow_int(alpha);
    let mut acc = Interval::ZERO;
    for k in (1..=n).rev() {
        let x = Interval::point(k as f64);
        acc = acc + (1.0 + ta * x.pow_int(alpha)).recip().unwrap();
    }
    let head = t * (1.0 + 2.0 * acc);
    let tail = 2.0 * t * tail_power_f(alpha, ta, 0, n);
    LatticeEnergyTerms {
        truncation_n: n,
        head,
        tail,
    }
}

/// Upper bound for the lattice-energy remainder from the classical
/// comparison `sum_{n>=k} n^-b <= k^-b (b + k - 1)/(b - 1)` with `k = N`.
pub fn coarse_energy_tail(alpha: u32, t: Interval, n: u64) -> Interval {
    let tn = t * (n as f64);
    let al = alpha as f64;
    let factor = Interval::ratio(al + n as f64 - 1.0, al - 1.0);
    2.0 * t * tn.pow_int(alpha).recip().unwrap() * factor
}

/// Closed form of `E_4(t)`:
/// `(pi/sqrt 2) (sinh a + sin a)/(cosh a - cos a)` with `a = pi sqrt 2 / t`.
pub fn closed_form_energy_alpha4(t: Interval) -> Interval {
    assert!(t.lo() > 0.0);
    let r2 = Interval::point(2.0).sqrt().unwrap();
    let a = (Interval::PI * r2).div(t).unwrap();
    // divide numerator and denominator by e^a / 2
    let e1 = (-a).exp();
    let e2 = e1.sqr();
    let num = 1.0 - e2 + 2.0 * e1 * a.sin();
    let den = 1.0 + e2 - 2.0 * e1 * a.cos();
    Interval::PI.div(r2).unwrap() * num.div(den).unwrap()
}

/// `sum_n g((t n)^a)` with `g(u) = (1 - (a-1)u)/(1+u)^2`, scale `c = t^a`.
fn g_sum(alpha: u32, c: Interval, n: u64) -> Interval {
    let am1 = (alpha - 1) as f64;
    let mut acc = Interval::ZERO;
    for k in (1..=n).rev() {
        let u = c * Interval::point(k as f64).pow_int(alpha);
        let term = (1.0 - am1 * u).div((1.0 + u).sqr()).unwrap();
        acc = acc + term;
    }
    let tail = tail_power_f(alpha, c, 0, n) + tail_power_df(alpha, c, 1, n);
    1.0 + 2.0 * (acc + tail)
}

/// `E_a'(t) = sum_n (f_a(tn) + tn f_a'(tn))`.
///
/// # Panics
/// If `t.lo() <= 1/2` or `n < 2`.
pub fn energy_derivative(alpha: u32, t: Interval, n: u64) -> Interval {
    assert!(t.lo() > 0.5 && n >= 2);
    g_sum(alpha, t.pow_int(alpha), n)
}

/// `sum_n (F_a(n) + n F_a'(n))`, zero at the true spacing.
pub fn first_order_residual(ctx: &PotentialContext, n: u64) -> Interval {
    assert!(n >= 2);
    g_sum(ctx.alpha, ctx.s_pow_alpha, n)
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Sign {
    Neg,
    Pos,
    Unknown,
}

fn sign_of(r: Interval) -> Sign {
    if r.hi() < 0.0 {
        Sign::Neg
    } else if r.lo() > 0.0 {
        Sign::Pos
    } else {
        Sign::Unknown
    }
}

fn point_sign(alpha: u32, t: f64) -> Sign {
    sign_of(energy_derivative(alpha, Interval::point(t), SOLVE_N))
}

/// Certified enclosure of the minimiser of `E_a` on `[1, 2]`.
///
/// The bracket is cut into 1024 cells and the derivative's sign is
/// certified on each. Exactly one run of undecided cells between a
/// negative prefix and a positive suffix is required; the root is then
/// narrowed by bisection on thin-point signs.
pub fn solve_s_alpha(alpha: u32, tol: f64) -> Result<PotentialContext, PotentialError> {
    validate_alpha(alpha)?;
    let cells: alloc::vec::Vec<Sign> = (0..SIGN_CELLS)
        .map(|i| {
            let a = 1.0 + i as f64 / SIGN_CELLS as f64;
            let b = 1.0 + (i + 1) as f64 / SIGN_CELLS as f64;
            sign_of(energy_derivative(alpha, Interval::new(a, b), SOLVE_N))
        })
        .collect();
    let k0 = cells.iter().position(|&s| s != Sign::Neg);
    let k1 = cells.iter().rposition(|&s| s != Sign::Pos);
    let (k0, k1) = match (k0, k1) {
        (Some(k0), Some(k1)) if k0 <= k1 => (k0, k1),
        _ => return Err(PotentialError::Ambiguous { candidates: 0 }),
    };
    let run = &cells[k0..=k1];
    if run.iter().any(|&s| s != Sign::Unknown) {
        let candidates = run.iter().filter(|&&s| s == Sign::Unknown).count().max(2);
        return Err(PotentialError::Ambiguous { candidates });
    }
    refine(alpha, k0, k1 + 1, tol)
}

fn refine(alpha: u32, i0: usize, i1: usize, tol: f64) -> Result<PotentialContext, PotentialError> {
    let mut a = 1.0 + i0 as f64 / SIGN_CELLS as f64;
    let mut b = 1.0 + i1 as f64 / SIGN_CELLS as f64;
    if point_sign(alpha, a) != Sign::Neg || point_sign(alpha, b) != Sign::Pos {
        // widen by a cell on each side; the neighbours are sign-certified
        a -= 1.0 / SIGN_CELLS as f64;
        b += 1.0 / SIGN_CELLS as f64;
        if point_sign(alpha, a) != Sign::Neg || point_sign(alpha, b) != Sign::Pos {
            return Err(PotentialError::Ambiguous { candidates: i1 - i0 });
        }
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match point_sign(alpha, m) {
            Sign::Neg => a = m,
            Sign::Pos => b = m,
            Sign::Unknown => {
                // the root is within rounding noise of m: tighten each side alone
                let (mut l, mut r) = (a, m);
                while r - l > tol * 0.25 && 0.5 * (l + r) > l && 0.5 * (l + r) < r {
                    let c = 0.5 * (l + r);
                    if point_sign(alpha, c) == Sign::Neg {
                        l = c;
                    } else {
                        r = c;
                    }
                }
                a = l;
                let (mut l, mut r) = (m, b);
                while r - l > tol * 0.25 && 0.5 * (l + r) > l && 0.5 * (l + r) < r {
                    let c = 0.5 * (l + r);
                    if point_sign(alpha, c) == Sign::Pos {
                        r = c;
                    } else {
                        l = c;
                    }
                }
                b = r;
                break;
            }
        }
    }
    if b - a > tol {
        return Err(PotentialError::Unresolved { width: b - a });
    }
    Ok(PotentialContext::from_spacing(alpha, Interval::new(a, b)))
}

/// `H_a^+(0) = a - 2 + sqrt((a-2)^2 - 3)` and the bound
/// `(2a/0.99^2) (a+1)^2 / (2^(a-1) (a-1))` on the correction term.
pub fn asymptotic_s_pow_alpha(alpha: u32) -> Result<(Interval, Interval), PotentialError> {
    validate_alpha(alpha)?;
    if alpha < 12 {
        return Err(PotentialError::AlphaOutOfRange { alpha, min: 12 });
    }
    let a = Interval::point(alpha as f64);
    let am2 = a - 2.0;
    let h = am2 + (am2.sqr() - 3.0).sqrt().unwrap();
    let c = (2.0 * a).div(Interval::point(0.99).sqr()).unwrap();
    let pow2 = Interval::point(2.0).pow_int(alpha - 1);
    let g = c * (a + 1.0).sqr().div(pow2 * (a - 1.0)).unwrap();
    Ok((h, g))
}
