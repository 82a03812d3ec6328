//! The band-limited interpolant `psi` of `F_a` and its Fourier transform.
//!
//! `psi` matches `F_a` and `F_a'` at every integer and has spectrum in
//! `[-1, 1]`. It is evaluated in the product-of-sinc form
//!
//! `psi(x) = sum_n F(n) sinc(pi(x-n))^2 + sum_n n F'(n) sinc(pi(x-n)) sinc(pi(x+n))`
//!
//! whose summands are bounded and free of removable singularities.

use alloc::vec::Vec;

use crate::interval::Interval;
use crate::potential::{tail_power_df, tail_power_f, PotentialContext};

/// Default truncation for `psi` and its transform.
pub const AUX_N: u64 = 256;

/// Tables of `F_a(n)` and `F_a'(n)` with enclosures of the remainders.
#[derive(Clone, Debug)]
pub struct AuxCoefficients {
    pub ctx: PotentialContext,
    pub n: u64,
    /// `F_a(k)` for `k = 0..=n`.
    pub f_n: Vec<Interval>,
    /// `F_a'(k)` for `k = 0..=n`; entry 0 is exactly 0.
    pub df_n: Vec<Interval>,
    /// `sum_{k > n} F_a(k)`.
    pub tail_f: Interval,
    /// `sum_{k > n} F_a'(k)`.
    pub tail_df: Interval,
}

impl AuxCoefficients {
    /// # Panics
    /// If `n < 2`.
    pub fn new(ctx: PotentialContext, n: u64) -> AuxCoefficients {
        assert!(n >= 2, "truncation must be at least 2");
        let mut f_n = Vec::with_capacity(n as usize + 1);
        let mut df_n = Vec::with_capacity(n as usize + 1);
        f_n.push(Interval::ONE);
        df_n.push(Interval::ZERO);
        for k in 1..=n {
            let x = Interval::point(k as f64);
            f_n.push(ctx.f(x));
            df_n.push(ctx.df(x));
        }
        let mut c = AuxCoefficients {
            ctx,
            n,
            f_n,
            df_n,
            tail_f: Interval::ZERO,
            tail_df: Interval::ZERO,
        };
        c.tail_f = c.tail_pf(0);
        c.tail_df = c.tail_pdf(0);
        c
    }

    pub fn alpha(&self) -> u32 {
        self.ctx.alpha
    }

    /// `sum_{k > n} k^p F_a(k)`; needs `p <= a - 2`.
    pub fn tail_pf(&self, p: u32) -> Interval {
        tail_power_f(self.ctx.alpha, self.ctx.s_pow_alpha, p, self.n)
    }

    /// `sum_{k > n} k^p F_a'(k)`, which is `<= 0`; needs `p <= a - 1`.
    pub fn tail_pdf(&self, p: u32) -> Interval {
        let t = tail_power_df(self.ctx.alpha, self.ctx.s_pow_alpha, p, self.n);
        Interval::new(t.lo(), t.hi().min(0.0))
    }

    /// `sum_{k in Z} F_a(k)`.
    pub fn sum_f(&self) -> Interval {
        let head: Interval = self.f_n[1..].iter().rev().copied().sum();
        1.0 + 2.0 * (head + self.tail_f)
    }

    /// `sum_{k in Z} k^p F_a(k)` for even `p >= 2`.
    pub fn moment_f(&self, p: u32) -> Interval {
        let head: Interval = (1..=self.n)
            .rev()
            .map(|k| Interval::point(k as f64).pow_int(p) * self.f_n[k as usize])
            .sum();
        2.0 * (head + self.tail_pf(p))
    }

    /// `sum_{k in Z} k^p F_a'(k)` for odd `p >= 1`.
    pub fn moment_df(&self, p: u32) -> Interval {
        let head: Interval = (1..=self.n)
            .rev()
            .map(|k| Interval::point(k as f64).pow_int(p) * self.df_n[k as usize])
            .sum();
        2.0 * (head + self.tail_pdf(p))
    }

    /// Bound on `sup |psi(x)| (1 + x^2)`: with `|x^2 psi(x)| <= sum F(n)(1/pi + |n|)^2
    /// + sum |n F'(n)| (1/pi^2 + n^2)` and `|psi| <= sum F(n) + sum |n F'(n)|`.
    pub fn decay_constant(&self) -> f64 {
        let ip = Interval::PI.recip().unwrap();
        let abs1 = -self.moment_df(1);
        let abs3 = -self.moment_df(3);
        let sum_f = self.sum_f();
        // sum F(n)(1/pi + |n|)^2 = sum F/pi^2 + (2/pi) sum |n| F + sum n^2 F
        let abs_n_f = self.moment_abs_f();
        let x2 = ip.sqr() * sum_f + 2.0 * ip * abs_n_f + self.moment_f(2) + ip.sqr() * abs1 + abs3;
        let x0 = sum_f + abs1;
        (x2 + x0).hi()
    }

    fn moment_abs_f(&self) -> Interval {
        let head: Interval = (1..=self.n)
            .rev()
            .map(|k| (k as f64) * self.f_n[k as usize])
            .sum();
        2.0 * (head + self.tail_pf(1))
    }
}

/// Enclosure of `psi(x)`.
pub fn psi(c: &AuxCoefficients, x: Interval) -> Interval {
    let xa = x.abs();
    let mut acc = Interval::ZERO;
    for k in (1..=c.n).rev() {
        let kf = k as f64;
        let sm = (xa - kf).sinc_pi();
        let sp = (xa + kf).sinc_pi();
        let i = k as usize;
        acc = acc + c.f_n[i] * (sm.sqr() + sp.sqr()) + (2.0 * kf) * c.df_n[i] * (sm * sp);
    }
    acc = acc + xa.sinc_pi().sqr();
    // |sinc(pi y)| <= min(1, 1/(pi |y|)) and |x -+ k| >= k - |x| >= n + 1 - |x|
    let d = (c.n + 1) as f64 - xa.hi();
    let k2 = if d >= 1.0 {
        (Interval::PI * d).sqr().recip().unwrap().hi()
    } else {
        1.0
    };
    let tf = c.tail_f.hi();
    let tdf = -c.tail_pdf(1).lo();
    let kk = 2.0 * Interval::point(k2);
    let lo = (kk * tdf).hi();
    let hi = (kk * (Interval::point(tf) + tdf)).hi();
    acc + Interval::new(-lo, hi)
}

/// Enclosure of the transform of `psi`: zero for `|xi| >= 1`, otherwise
/// `(1 - |xi|) sum F(n) cos(2 pi n xi) - (1/(2 pi)) sum F'(n) sin(2 pi n |xi|)`.
pub fn psi_hat(c: &AuxCoefficients, xi: Interval) -> Interval {
    let a = xi.abs();
    if a.lo() >= 1.0 {
        return Interval::ZERO;
    }
    let b = Interval::new(a.lo(), a.hi().min(1.0));
    let mut cs = Interval::ZERO;
    let mut ss = Interval::ZERO;
    for k in (1..=c.n).rev() {
        let arg = b * (2.0 * k as f64);
        cs = cs + c.f_n[k as usize] * arg.cos_pi();
        ss = ss + c.df_n[k as usize] * arg.sin_pi();
    }
    let tf = c.tail_f.hi();
    let tdf = -c.tail_df.lo();
    cs = 1.0 + 2.0 * (cs + Interval::new(-tf, tf));
    ss = ss + Interval::new(-tdf, tdf);
    let ip = Interval::PI.recip().unwrap();
    let v = (1.0 - b) * cs - ip * ss;
    if a.hi() > 1.0 {
        v.hull(Interval::ZERO)
    } else {
        v
    }
}

/// Enclosure of `psi_hat(1 - t) / (pi^2 t^3)` for `t` in `[0, 1/2]`:
/// `sum n^3 F'(n)(-2/3 + 4 R(2 pi n t)) - sum 2 n^2 F(n) sinc(pi n t)^2`.
///
/// # Panics
/// If `t` is not inside `[0, 1/2]`.
pub fn psi_hat_near_one(c: &AuxCoefficients, t: Interval) -> Interval {
    assert!(t.lo() >= 0.0 && t.hi() <= 0.5, "t must lie in [0, 1/2]");
    let two_pi = 2.0 * Interval::PI;
    let mut acc = Interval::ZERO;
    for k in (1..=c.n).rev() {
        let kf = Interval::point(k as f64);
        let r = (two_pi * kf * t).remainder_r();
        let a = kf.pow_int(3) * c.df_n[k as usize] * (4.0 * r - Interval::ratio(2.0, 3.0));
        let b = 2.0 * kf.sqr() * c.f_n[k as usize] * (kf * t).sinc_pi().sqr();
        acc = acc + a - b;
    }
    // remainders: -2/3 + 4R(y) = -4/y^2 + 4 sin(y)/y^3 lies in [-2/3, 0] and
    // above -(4/y^2 + 4/y^3); sinc(pi n t)^2 <= min(1, 1/(pi n t)^2)
    let t1 = -c.tail_pdf(1).lo();
    let t0 = -c.tail_pdf(0).lo();
    let t3 = -c.tail_pdf(3).lo();
    let f2 = c.tail_pf(2).hi();
    let f0 = c.tail_f.hi();
    let mut b1 = (Interval::ratio(2.0, 3.0) * t3).hi();
    let mut b2 = 2.0 * f2;
    if t.lo() > 0.0 {
        let y = two_pi * t.lo();
        let alt = (4.0 * y.sqr().recip().unwrap() * t1 + 4.0 * y.pow_int(3).recip().unwrap() * t0).hi();
        b1 = b1.min(alt);
        let z = Interval::PI * t.lo();
        b2 = b2.min((2.0 * z.sqr().recip().unwrap() * f0).hi());
    }
    2.0 * (acc + Interval::new(-b2, b1))
}

/// Composite Simpson quadrature of the truncated `psi` over `[-n-1, n+1]`
/// minus `sum F(n)`. Plain binary64; the quadrature error is not enclosed.
///
/// # Panics
/// If `points < 2`.
pub fn poisson_check(c: &AuxCoefficients, points: usize) -> Interval {
    assert!(points >= 2);
    let m = points + points % 2;
    let half = (c.n + 1) as f64;
    let h = 2.0 * half / m as f64;
    let fm: Vec<f64> = c.f_n.iter().map(|v| v.mid()).collect();
    let dm: Vec<f64> = c.df_n.iter().map(|v| v.mid()).collect();
    let mut acc = 0.0;
    for i in 0..=m {
        let x = -half + i as f64 * h;
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * psi_f64(&fm, &dm, x);
    }
    let quad = acc * h / 3.0;
    Interval::point(quad) - c.sum_f()
}

fn sinc_pi_f64(y: f64) -> f64 {
    let z = core::f64::consts::PI * y;
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        libm::sin(z) / z
    }
}

fn psi_f64(fm: &[f64], dm: &[f64], x: f64) -> f64 {
    let s0 = sinc_pi_f64(x);
    let mut acc = s0 * s0;
    for k in 1..fm.len() {
        let kf = k as f64;
        let sm = sinc_pi_f64(x - kf);
        let sp = sinc_pi_f64(x + kf);
        acc += fm[k] * (sm * sm + sp * sp) + 2.0 * kf * dm[k] * sm * sp;
    }
    acc
}
