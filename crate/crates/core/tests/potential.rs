use proptest::prelude::*;
use repulse_core::potential::*;
use repulse_core::{Interval, PotentialContext, PotentialError};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

const PREC: u32 = 256;

fn hp(x: f64) -> Float {
    Float::with_val(PREC, x)
}

fn hpi() -> Float {
    Float::with_val(PREC, Constant::Pi)
}

fn holds(r: Interval, v: &Float) -> bool {
    *v >= r.lo() && *v <= r.hi()
}

fn sqrt2() -> Interval {
    Interval::point(2.0).sqrt().unwrap()
}

/// (pi/sqrt2) (1 + 2(-1)^m / (e^(pi m) - (-1)^m)), the closed form at t = sqrt2/m.
fn closed_form_at_m(m: u32) -> Float {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let e = (hpi() * m).exp();
    let bracket = hp(1.0) + hp(2.0 * sign) / (e - sign);
    hpi() / hp(2.0).sqrt() * bracket
}

#[test]
fn f_alpha_examples() {
    let z = f_alpha(4, Interval::ZERO);
    assert_eq!((z.lo(), z.hi()), (1.0, 1.0));
    assert!(f_alpha(4, Interval::ONE).contains(0.5));
    let r = f_alpha(6, Interval::point(2.0));
    assert!(holds(r, &(hp(1.0) / 65u32)));
}

#[test]
fn rescaled_potential_examples() {
    let ctx = PotentialContext::alpha4_exact();
    assert!(ctx.f(Interval::ONE).contains(0.2));
    assert!(ctx.f1.contains(0.2));
    assert!(ctx.df1.contains(-0.64));
    let z = ctx.f(Interval::ZERO);
    assert_eq!((z.lo(), z.hi()), (1.0, 1.0));
    let x9 = Interval::point(9.0);
    assert!(ctx.f(x9).hi() < 0.5);
    assert!(ctx.d2f(x9).lo() >= 0.0);
    // both forms of F' agree away from 0, the quotient form refuses 0
    for &x in &[0.3, 1.0, 2.5, 7.0] {
        let xi = Interval::point(x);
        assert!(ctx.df(xi).overlaps(ctx.df_quotient(xi).unwrap()));
    }
    assert_eq!(ctx.df_quotient(Interval::new(-0.1, 0.1)), Err(PotentialError::Domain));
    let d = ctx.df(Interval::new(-0.1, 0.1));
    assert!(d.contains(0.0));
    // (F(1/2) - 1)/(1/4) = -0.8 for a = 4
    assert!(ctx.f_minus_one_over_sq(Interval::point(0.5)).contains(-0.8));
}

#[test]
fn second_derivative_matches_finite_differences() {
    let ctx = solve_s_alpha(8, DEFAULT_TOL).unwrap();
    for &x in &[0.4, 0.9, 1.3, 2.0] {
        let h = 1e-4;
        let fx = |y: f64| ctx.f(Interval::point(y)).mid();
        let fd = (fx(x + h) - 2.0 * fx(x) + fx(x - h)) / (h * h);
        let d2 = ctx.d2f(Interval::point(x)).mid();
        assert!((fd - d2).abs() < 1e-5 * (1.0 + d2.abs()), "{x}: {fd} vs {d2}");
        let d1 = (fx(x + h) - fx(x - h)) / (2.0 * h);
        assert!((d1 - ctx.df(Interval::point(x)).mid()).abs() < 1e-7);
    }
}

#[test]
fn closed_form_energy_at_sqrt2_over_m() {
    for m in 1..=3u32 {
        let t = sqrt2().div_f64(m as f64);
        let exact = closed_form_at_m(m);
        let cf = closed_form_energy_alpha4(t);
        assert!(holds(cf, &exact), "m = {m}: {cf} vs {}", exact.to_f64());
        let le = lattice_energy(4, t, 64).total();
        assert!(holds(le, &exact), "m = {m}: {le} vs {}", exact.to_f64());
        assert!(cf.width() + le.width() <= 1e-10);
    }
    // m = 1 is (pi/sqrt2) tanh(pi/2)
    let v = closed_form_energy_alpha4(sqrt2()).mid();
    assert!((v - 2.037_400_231_9).abs() < 1e-9);
}

#[test]
fn closed_form_agrees_with_lattice_sum() {
    let mut state = 0x1234_5678_u64;
    for _ in 0..50 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let t = 0.5 + 2.5 * ((state >> 11) as f64 / (1u64 << 53) as f64);
        let ti = Interval::point(t);
        let cf = closed_form_energy_alpha4(ti);
        let le = lattice_energy(4, ti, 256).total();
        assert!(cf.overlaps(le), "t = {t}: {cf} vs {le}");
    }
}

#[test]
fn head_is_symmetric_sum() {
    let t = Interval::point(1.3);
    let terms = lattice_energy(6, t, 40);
    let mut brute = Interval::ZERO;
    for n in -40i64..=40 {
        brute = brute + t * f_alpha(6, t * (n as f64));
    }
    assert!(terms.head.overlaps(brute));
    assert!((terms.head.mid() - brute.mid()).abs() < 1e-14);
}

#[test]
fn tails_shrink_and_sit_inside_the_coarse_bound() {
    for &alpha in &[4u32, 6, 10] {
        let t = Interval::point(1.2);
        let mut prev = f64::INFINITY;
        for &n in &[8u64, 16, 32, 64, 128, 256] {
            let e = lattice_energy(alpha, t, n);
            assert!(e.tail.lo() >= 0.0);
            assert!(e.tail.hi() <= coarse_energy_tail(alpha, t, n).hi());
            assert!(e.tail.hi() <= prev);
            prev = e.tail.hi();
        }
        let w64 = lattice_energy(alpha, t, 64).total().width();
        let w128 = lattice_energy(alpha, t, 128).total().width();
        assert!(w128 <= w64 * 1.5, "{alpha}: {w64} -> {w128}");
    }
}

#[test]
fn zeta_tail_encloses_high_precision_sum() {
    for &(beta, n0) in &[(2u32, 10u64), (3, 1), (4, 64), (9, 3), (17, 100), (81, 256)] {
        let z = zeta_tail(beta, n0);
        // the head cancels ~650 bits for beta = 81
        let mut exact = Float::with_val(1200, beta).zeta();
        for k in 1..=n0 {
            exact -= Float::with_val(1200, k).pow(-(beta as i32));
        }
        assert!(holds(z, &exact), "beta {beta}, n0 {n0}: {z} vs {}", exact.to_f64());
        assert!(n0 < 10 || z.width() <= 1e-4 * z.hi(), "beta {beta}, n0 {n0}: {z}");
    }
}

#[test]
fn energy_derivative_examples() {
    let d = energy_derivative(4, sqrt2(), 128);
    assert!(d.contains(0.0), "{d}");
    let neg = energy_derivative(6, Interval::ONE, 128);
    assert!(neg.hi() < 0.0);
    // brute force with N = 10^4
    let brute: f64 = 1.0
        + 2.0
            * (1..=10_000)
                .map(|n| {
                    let u = (n as f64).powi(6);
                    (1.0 - 5.0 * u) / ((1.0 + u) * (1.0 + u))
                })
                .sum::<f64>();
    assert!(neg.inflate(1e-10).contains(brute));
    for &alpha in &[6u32, 8, 10] {
        let ctx = solve_s_alpha(alpha, DEFAULT_TOL).unwrap();
        assert!(energy_derivative(alpha, ctx.s_alpha, 128).contains(0.0));
    }
}

#[test]
fn solver_examples() {
    let c4 = solve_s_alpha(4, 1e-12).unwrap();
    assert!(c4.s_alpha.contains(std::f64::consts::SQRT_2));
    assert!(holds(c4.s_alpha, &hp(2.0).sqrt()));
    assert!(c4.s_alpha.width() <= 1e-12);
    let c12 = solve_s_alpha(12, DEFAULT_TOL).unwrap();
    assert!(c12.s_pow_alpha.subset_of(Interval::new(19.0, 21.0)));
    let c20 = solve_s_alpha(20, DEFAULT_TOL).unwrap();
    let (h, g) = asymptotic_s_pow_alpha(20).unwrap();
    assert!((h.mid() - (18.0 + 321f64.sqrt())).abs() < 1e-12);
    assert!(c20.s_pow_alpha.subset_of(Interval::new(h.lo() - g.hi(), h.hi() + g.hi())));
    assert_eq!(solve_s_alpha(7, 1e-12), Err(PotentialError::InvalidAlpha(7)));
    assert_eq!(solve_s_alpha(2, 1e-12), Err(PotentialError::InvalidAlpha(2)));
}

#[test]
fn six_has_the_solver_spacing() {
    let c6 = solve_s_alpha(6, DEFAULT_TOL).unwrap();
    assert!((c6.s_alpha.mid() - 1.409_364_789_885).abs() < 1e-11);
}

#[test]
fn context_invariants() {
    for alpha in (4..=40).step_by(2) {
        let ctx = solve_s_alpha(alpha, DEFAULT_TOL).unwrap();
        assert!(ctx.s_alpha.lo() > 1.0);
        if alpha >= 12 {
            let a = alpha as f64;
            assert!(ctx.s_pow_alpha.subset_of(Interval::new(2.0 * a - 5.0, 2.0 * a - 3.0)));
            let f1_box = Interval::new(1.0 / (2.0 * a - 2.0), 1.0 / (2.0 * a - 4.0));
            assert!(ctx.f1.subset_of(f1_box.inflate(1e-15)));
            let d_box = Interval::new((1.0 - 1.0 / (2.0 * a - 4.0)) / 2.0, a / (2.0 * a - 4.0));
            assert!((-ctx.df1).subset_of(d_box.inflate(1e-15)));
            let (h, g) = asymptotic_s_pow_alpha(alpha).unwrap();
            assert!(ctx.s_pow_alpha.subset_of(Interval::new(h.lo() - g.hi(), h.hi() + g.hi())));
        }
    }
}

#[test]
fn asymptotic_examples() {
    let (h, g) = asymptotic_s_pow_alpha(12).unwrap();
    let exact = hp(10.0) + hp(97.0).sqrt();
    assert!(holds(h, &exact));
    assert!((h.mid() - 19.8489).abs() < 1e-4);
    let gx = hp(24.0) / hp(0.9801) * 169u32 / (2048u32 * 11u32);
    assert!((g.mid() - gx.to_f64()).abs() < 1e-12 && (g.mid() - 0.1837).abs() < 1e-4);
    assert_eq!(
        asymptotic_s_pow_alpha(10),
        Err(PotentialError::AlphaOutOfRange { alpha: 10, min: 12 })
    );
}

#[test]
fn first_order_residual_examples() {
    assert!(first_order_residual(&PotentialContext::alpha4_exact(), 64).contains(0.0));
    let c4 = solve_s_alpha(4, 1e-12).unwrap();
    assert!(first_order_residual(&c4, 64).contains(0.0));
    let coarse = solve_s_alpha(6, 1e-8).unwrap();
    let fine = solve_s_alpha(6, 1e-12).unwrap();
    let (rc, rf) = (first_order_residual(&coarse, 64), first_order_residual(&fine, 64));
    assert!(rc.contains(0.0) && rf.contains(0.0));
    assert!(rf.width() < rc.width());
    let wrong = PotentialContext::from_spacing(6, Interval::ONE);
    assert!(!first_order_residual(&wrong, 64).contains(0.0));
    for &alpha in &[4u32, 6, 8, 10, 12] {
        let ctx = solve_s_alpha(alpha, DEFAULT_TOL).unwrap();
        assert!(first_order_residual(&ctx, RESIDUAL_N).contains(0.0));
    }
}

#[test]
fn grid_minimum_sits_next_to_the_solver_root() {
    for &alpha in &[4u32, 6, 8, 10] {
        let ctx = solve_s_alpha(alpha, DEFAULT_TOL).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 / 199.0).collect();
        let best = grid
            .iter()
            .copied()
            .min_by(|a, b| {
                let ea = lattice_energy(alpha, Interval::point(*a), ENERGY_N).total().mid();
                let eb = lattice_energy(alpha, Interval::point(*b), ENERGY_N).total().mid();
                ea.partial_cmp(&eb).unwrap()
            })
            .unwrap();
        let s = ctx.s_alpha.mid();
        let nearest = grid
            .iter()
            .copied()
            .min_by(|a, b| (a - s).abs().partial_cmp(&(b - s).abs()).unwrap())
            .unwrap();
        assert_eq!(best, nearest, "alpha {alpha}");
    }
}

proptest! {
    #[test]
    fn f_alpha_is_monotone_on_the_half_line(a in 0.0f64..5.0, d in 0.0f64..5.0, k in 2u32..10) {
        let alpha = 2 * k;
        let (x1, x2) = (a, a + d);
        let (f1, f2) = (f_alpha(alpha, Interval::point(x1)), f_alpha(alpha, Interval::point(x2)));
        prop_assert!(f1.lo() >= f2.hi() - f1.width() - f2.width());
        prop_assert!(f1.lo() >= 0.0 && f1.hi() <= 1.0);
    }

    #[test]
    fn lattice_energy_contains_brute_force(t in 0.6f64..3.0, k in 2u32..7) {
        let alpha = 2 * k;
        let e = lattice_energy(alpha, Interval::point(t), 64).total();
        let mut s = 0.0;
        for n in (1..=20_000u32).rev() {
            s += 1.0 / (1.0 + (t * n as f64).powi(alpha as i32));
        }
        let brute = t * (1.0 + 2.0 * s);
        prop_assert!(e.inflate(1e-11).contains(brute), "{} vs {}", e, brute);
    }
}
