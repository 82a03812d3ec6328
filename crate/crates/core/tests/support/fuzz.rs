// Containment fuzzing of the interval kernels against MPFR.
//
// Shared between the interval tests and the acceptance target.

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use repulse_core::Interval;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

const PREC: u32 = 1024;

#[derive(Debug, Default)]
pub struct FuzzReport {
    pub cases: usize,
    pub violations: Vec<String>,
}

fn big(x: f64) -> Float {
    Float::with_val(PREC, x)
}

fn pi() -> Float {
    Float::with_val(PREC, Constant::Pi)
}

fn inside(r: Interval, v: &Float) -> bool {
    // endpoints are exact doubles; comparisons are exact
    *v >= r.lo() && *v <= r.hi()
}

fn sample(rng: &mut StdRng) -> f64 {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(-1.0..1.0),
        1 => rng.gen_range(-1000.0..1000.0),
        2 => {
            let e: f64 = rng.gen_range(-12.0..12.0);
            let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            s * 10f64.powf(e)
        }
        3 => rng.gen_range(-20i32..20) as f64 * 0.5,
        4 => rng.gen_range(-8.0..8.0),
        _ => f64::from_bits(rng.gen::<u64>() >> 2) * if rng.gen::<bool>() { 1.0 } else { -1.0 },
    }
}

fn check(rep: &mut FuzzReport, name: &str, x: f64, y: f64, r: Interval, v: Float) {
    rep.cases += 1;
    if !inside(r, &v) {
        rep.violations.push(format!("{name}({x:e}, {y:e}) = {r} misses {}", v.to_f64()));
    }
}

fn sin_pi_exact(y: f64) -> Float {
    if y.fract() == 0.0 {
        return big(0.0);
    }
    (pi() * big(y)).sin()
}

fn cos_pi_exact(y: f64) -> Float {
    if (y - 0.5).fract() == 0.0 {
        return big(0.0);
    }
    (pi() * big(y)).cos()
}

fn sinc_exact(x: &Float) -> Float {
    if x.is_zero() {
        return big(1.0);
    }
    Float::with_val(PREC, x.sin_ref()) / x
}

fn rem_exact(x: f64) -> Float {
    if x == 0.0 {
        return big(0.0);
    }
    if x.abs() < 1e-3 {
        // x^2/5! - x^4/7! + ..., summed far past double precision
        let b2 = big(x) * big(x);
        let mut term = Float::with_val(PREC, &b2 / 120u32);
        let mut acc = term.clone();
        for j in 3..40u32 {
            term = -term * &b2 / ((2 * j) * (2 * j + 1));
            acc += &term;
        }
        return acc;
    }
    let b = big(x);
    let x3 = Float::with_val(PREC, (&b).pow(3u32));
    let num = Float::with_val(PREC, b.sin_ref()) - &b + Float::with_val(PREC, &x3 / 6u32);
    num / x3
}

/// Runs `cases` random checks spread over every operation.
pub fn run_fuzz(cases: usize, seed: u64) -> FuzzReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rep = FuzzReport::default();
    let ops = 16;
    for i in 0..cases {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let (xi, yi) = (Interval::point(x), Interval::point(y));
        let (bx, by) = (big(x), big(y));
        match i % ops {
            0 => check(&mut rep, "add", x, y, xi + yi, bx + by),
            1 => check(&mut rep, "sub", x, y, xi - yi, bx - by),
            2 => check(&mut rep, "mul", x, y, xi * yi, bx * by),
            3 => {
                if y != 0.0 {
                    check(&mut rep, "div", x, y, xi.div(yi).unwrap(), bx / by)
                } else {
                    rep.cases += 1;
                }
            }
            4 => {
                let a = x.abs();
                check(&mut rep, "sqrt", a, 0.0, Interval::point(a).sqrt().unwrap(), big(a).sqrt())
            }
            5 => {
                let a = x.clamp(-700.0, 700.0);
                check(&mut rep, "exp", a, 0.0, Interval::point(a).exp(), big(a).exp())
            }
            6 => {
                let a = x.abs();
                if a > 0.0 {
                    check(&mut rep, "log", a, 0.0, Interval::point(a).log().unwrap(), big(a).ln())
                } else {
                    rep.cases += 1;
                }
            }
            7 => check(&mut rep, "sin", x, 0.0, xi.sin(), bx.sin()),
            8 => check(&mut rep, "cos", x, 0.0, xi.cos(), bx.cos()),
            9 => check(&mut rep, "sin_pi", x, 0.0, xi.sin_pi(), sin_pi_exact(x)),
            10 => check(&mut rep, "cos_pi", x, 0.0, xi.cos_pi(), cos_pi_exact(x)),
            11 => check(&mut rep, "sinc", x, 0.0, xi.sinc(), sinc_exact(&bx)),
            12 => {
                let v = if x == 0.0 {
                    big(1.0)
                } else if x.fract() == 0.0 {
                    big(0.0)
                } else {
                    sinc_exact(&(pi() * big(x)))
                };
                check(&mut rep, "sinc_pi", x, 0.0, xi.sinc_pi(), v)
            }
            13 => check(&mut rep, "remainder_r", x, 0.0, xi.remainder_r(), rem_exact(x)),
            14 => {
                let s3 = Float::with_val(PREC, 1) / 6u32 - rem_exact(x);
                check(&mut rep, "s3_kernel", x, 0.0, xi.s3_kernel(), s3)
            }
            _ => {
                let k = rng.gen_range(0..13u32);
                let b = x.clamp(-1.0e20, 1.0e20);
                check(&mut rep, "pow_int", b, k as f64, Interval::point(b).pow_int(k), big(b).pow(k))
            }
        }
    }
    rep
}
