use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use repulse_core::auxfn::{psi, psi_hat, AuxCoefficients};
use repulse_core::certify::{self, BnbPolicy, Certificate, CertifyError, Status, CERTIFY_MENU, CERT_N};
use repulse_core::potential::{closed_form_energy_alpha4, lattice_energy, solve_s_alpha, PotentialError, DEFAULT_TOL};
use repulse_core::simulate::{self, RelaxParams, SimError};
use repulse_core::{Interval, PotentialContext};

use crate::manifest::RunManifest;
use crate::{Command, Inequality};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_AMBIGUOUS: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_UNRESOLVED: u8 = 5;

/// Endpoint as a shortest round-trip decimal string.
fn ep(x: f64) -> String {
    format!("{x:?}")
}

fn ends(prefix: &str, i: Interval, obj: &mut serde_json::Map<String, Value>) {
    obj.insert(format!("{prefix}lo"), Value::String(ep(i.lo())));
    obj.insert(format!("{prefix}hi"), Value::String(ep(i.hi())));
}

fn potential_exit(e: &PotentialError) -> u8 {
    match e {
        PotentialError::Ambiguous { .. } => EXIT_AMBIGUOUS,
        PotentialError::Unresolved { .. } => EXIT_UNRESOLVED,
        _ => EXIT_INVALID,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialisable"));
}

/// Context used for evaluation: exact for `a = 4`, solved otherwise.
fn context(alpha: u32) -> Result<PotentialContext, PotentialError> {
    repulse_core::potential::validate_alpha(alpha)?;
    if alpha == 4 {
        Ok(PotentialContext::alpha4_exact())
    } else {
        solve_s_alpha(alpha, DEFAULT_TOL)
    }
}

fn clock_ms() -> u64 {
    static T0: OnceLock<Instant> = OnceLock::new();
    T0.get_or_init(Instant::now).elapsed().as_millis() as u64
}

/// 0 when all verified, else 1 if any failed, else 4.
pub fn exit_code(certs: &[Certificate]) -> u8 {
    match certs.iter().map(|c| c.status).max() {
        None | Some(Status::Verified) => EXIT_OK,
        Some(Status::Failed) => EXIT_FAILED,
        Some(Status::Inconclusive) => EXIT_INCONCLUSIVE,
    }
}

pub fn run(cmd: Command, manifest: Option<PathBuf>) -> u8 {
    match cmd {
        Command::Salpha { alpha, tol } => salpha(alpha, tol),
        Command::Energy { alpha, t, n } => energy(alpha, t, n),
        Command::Psi { alpha, x, n } => aux(alpha, &x, n, false),
        Command::Psihat { alpha, xi, n } => aux(alpha, &xi, n, true),
        Command::Certify {
            alpha,
            inequality,
            max_depth,
            budget,
            out,
        } => {
            let mut policy = BnbPolicy::default().with_clock(clock_ms);
            if let Some(d) = max_depth {
                policy.max_depth = d;
            }
            if let Some(b) = budget {
                policy.budget = b;
            }
            certify_cmd(alpha, inequality, &policy, out.as_deref(), manifest.as_deref())
        }
        Command::Simulate {
            alpha,
            rho,
            length,
            seed,
            iters,
            gap,
            csv,
            svg,
        } => {
            let seed = match std::env::var("REPULSE_SEED") {
                Ok(s) => match s.trim().parse() {
                    Ok(v) => v,
                    Err(_) => return fail(EXIT_INVALID, format!("REPULSE_SEED={s} is not an integer")),
                },
                Err(_) => seed,
            };
            let args = SimArgs {
                alpha,
                rho,
                length,
                seed,
                iters,
                gap,
                csv,
                svg,
            };
            simulate_cmd(&args, manifest.as_deref())
        }
    }
}

fn salpha(alpha: u32, tol: f64) -> u8 {
    let ctx = match solve_s_alpha(alpha, tol) {
        Ok(c) => c,
        Err(e) => return fail(potential_exit(&e), e),
    };
    let e = lattice_energy(alpha, ctx.s_alpha, repulse_core::potential::ENERGY_N).total();
    let mut m = serde_json::Map::new();
    m.insert("alpha".into(), json!(alpha));
    ends("s_", ctx.s_alpha, &mut m);
    ends("s_pow_alpha_", ctx.s_pow_alpha, &mut m);
    ends("energy_", e, &mut m);
    print(&Value::Object(m));
    EXIT_OK
}

fn energy(alpha: u32, t: f64, n: u64) -> u8 {
    if let Err(e) = repulse_core::potential::validate_alpha(alpha) {
        return fail(EXIT_INVALID, e);
    }
    if !(t > 0.0 && t.is_finite()) || n < 2 {
        return fail(EXIT_INVALID, "need t > 0 and n >= 2");
    }
    let ti = Interval::point(t);
    let terms = lattice_energy(alpha, ti, n);
    let mut m = serde_json::Map::new();
    m.insert("alpha".into(), json!(alpha));
    m.insert("t".into(), Value::String(ep(t)));
    m.insert("n".into(), json!(n));
    ends("head_", terms.head, &mut m);
    ends("tail_", terms.tail, &mut m);
    ends("total_", terms.total(), &mut m);
    if alpha == 4 {
        ends("closed_form_", closed_form_energy_alpha4(ti), &mut m);
    }
    print(&Value::Object(m));
    EXIT_OK
}

fn aux(alpha: u32, points: &[f64], n: u64, transform: bool) -> u8 {
    if n < 2 {
        return fail(EXIT_INVALID, "need n >= 2");
    }
    let ctx = match context(alpha) {
        Ok(c) => c,
        Err(e) => return fail(potential_exit(&e), e),
    };
    let c = AuxCoefficients::new(ctx, n);
    let key = if transform { "xi" } else { "x" };
    let rows: Vec<Value> = points
        .par_iter()
        .map(|&p| {
            let v = if transform {
                psi_hat(&c, Interval::point(p))
            } else {
                psi(&c, Interval::point(p))
            };
            json!({ key: ep(p), "lo": ep(v.lo()), "hi": ep(v.hi()) })
        })
        .collect();
    print(&json!({ "alpha": alpha, "n": n, "values": rows }));
    EXIT_OK
}

fn certify_exit(e: &CertifyError) -> u8 {
    match e {
        CertifyError::Potential(p) => potential_exit(p),
        CertifyError::Precondition(_) => EXIT_INVALID,
    }
}

/// Solves only when the route needs tables.
fn needs_tables(ineq: Inequality, alpha: u32) -> bool {
    match ineq {
        Inequality::W => false,
        Inequality::T | Inequality::L | Inequality::Eta0 => alpha < 12,
        Inequality::Eta1 => alpha <= 1000,
        Inequality::Eta2 => alpha < 16,
        _ => true,
    }
}

pub fn certify_one(alpha: u32, ineq: Inequality, policy: &BnbPolicy) -> Result<Vec<Certificate>, CertifyError> {
    repulse_core::potential::validate_alpha(alpha)?;
    if ineq == Inequality::All {
        return certify::certify_all(alpha, policy);
    }
    if !needs_tables(ineq, alpha) {
        return Ok(vec![match ineq {
            Inequality::W => certify::certify_w_inequality(policy),
            Inequality::T => certify::certify_t_large(alpha, policy)?,
            Inequality::L => certify::certify_l_large(alpha, policy)?,
            Inequality::Eta0 => certify::certify_eta0_large(alpha, policy)?,
            Inequality::Eta1 => certify::certify_eta1_large(alpha, policy)?,
            _ => certify::certify_far_field_large(alpha, policy)?,
        }]);
    }
    let c = AuxCoefficients::new(context(alpha)?, CERT_N);
    Ok(match ineq {
        Inequality::T => vec![certify::certify_t(&c, policy)?],
        Inequality::L => vec![certify::certify_l(&c, policy)?],
        Inequality::Psi4 => vec![certify::certify_psi4_le_f4(&c, policy)?],
        Inequality::Eta0 => vec![certify::certify_eta0(&c, policy)?],
        Inequality::Eta1 => vec![certify::certify_eta1(&c, policy)?],
        Inequality::Eta2 => vec![certify::certify_eta_ge2(&c, policy)?],
        _ => certify::certify_psihat_nonneg(&c, policy)?,
    })
}

fn certify_cmd(
    alpha: Option<u32>,
    ineq: Inequality,
    policy: &BnbPolicy,
    out: Option<&Path>,
    manifest: Option<&Path>,
) -> u8 {
    let mut man = RunManifest::start("certify");
    let alphas: Vec<u32> = match (alpha, ineq) {
        (Some(a), _) => vec![a],
        (None, Inequality::All) => CERTIFY_MENU.to_vec(),
        (None, _) => return fail(EXIT_INVALID, "--alpha is required unless --inequality all"),
    };
    man.param("alpha", format!("{alphas:?}"));
    man.param("inequality", format!("{ineq:?}"));
    man.param("max_depth", policy.max_depth);
    man.param("budget", policy.budget);
    let results: Vec<Result<Vec<Certificate>, CertifyError>> =
        alphas.par_iter().map(|&a| certify_one(a, ineq, policy)).collect();
    let mut certs = Vec::new();
    for (a, r) in alphas.iter().zip(results) {
        match r {
            Ok(v) => certs.extend(v),
            Err(e) => return fail(certify_exit(&e), format!("alpha = {a}: {e}")),
        }
    }
    let text = serde_json::to_string_pretty(&certs).expect("serialisable") + "\n";
    match out {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                return fail(EXIT_INVALID, format!("{}: {e}", p.display()));
            }
            man.outputs.push(p.to_path_buf());
        }
        None => print!("{text}"),
    }
    for c in &certs {
        eprintln!(
            "{:?} alpha={} {:?} boxes={} min_lb={:e}",
            c.inequality_id, c.alpha, c.status, c.boxes_processed, c.min_lower_bound
        );
    }
    if let Err(e) = man.finish(manifest) {
        eprintln!("warning: manifest not written: {e}");
    }
    exit_code(&certs)
}

struct SimArgs {
    alpha: u32,
    rho: f64,
    length: f64,
    seed: u64,
    iters: u32,
    gap: Option<f64>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary {
    alpha: u32,
    rho: f64,
    length: f64,
    count: usize,
    seed: u64,
    iterations: u32,
    converged: bool,
    grad_norm: f64,
    energy_per_particle: f64,
    s_alpha: f64,
    gap_threshold: f64,
    clusters: usize,
    mean_spacing: Option<f64>,
    spacing_cv: Option<f64>,
    count_histogram: Vec<(usize, usize)>,
}

fn sim_exit(e: &SimError) -> u8 {
    match e {
        SimError::Potential(p) => potential_exit(p),
        _ => EXIT_INVALID,
    }
}

fn simulate_cmd(a: &SimArgs, manifest: Option<&Path>) -> u8 {
    let mut man = RunManifest::start("simulate");
    for (k, v) in [
        ("alpha", a.alpha.to_string()),
        ("rho", ep(a.rho)),
        ("length", ep(a.length)),
        ("seed", a.seed.to_string()),
        ("iters", a.iters.to_string()),
    ] {
        man.param(k, v);
    }
    let ctx = match context(a.alpha) {
        Ok(c) => c,
        Err(e) => return fail(potential_exit(&e), e),
    };
    if !(a.rho >= 0.0 && a.length > 0.0 && a.rho.is_finite() && a.length.is_finite()) {
        return fail(EXIT_INVALID, "need rho >= 0 and length > 0");
    }
    let target = a.rho * a.length;
    let count = target.round();
    if (target - count).abs() > 1e-9 * count.max(1.0) {
        eprintln!("warning: rho * length = {target} rounded to {count} particles");
    }
    let params = RelaxParams {
        alpha: a.alpha,
        count: count as usize,
        length: a.length,
        seed: a.seed,
        iters: a.iters,
        tol: simulate::RELAX_TOL,
    };
    let out = match simulate::relax(&params) {
        Ok(o) => o,
        Err(e) => return fail(sim_exit(&e), e),
    };
    let s = ctx.s_alpha.mid();
    let gap = a.gap.unwrap_or(0.5 * s);
    man.param("gap", ep(gap));
    let report = match simulate::detect_clusters(&out.config, gap) {
        Ok(r) => r,
        Err(e) => return fail(sim_exit(&e), e),
    };
    if let Some(p) = &a.csv {
        if let Err(e) = fs::write(p, simulate::csv_string(&out.config)) {
            return fail(EXIT_INVALID, format!("{}: {e}", p.display()));
        }
        man.outputs.push(p.clone());
    }
    if let Some(p) = &a.svg {
        if let Err(e) = fs::write(p, simulate::svg_string(&out.config, &report)) {
            return fail(EXIT_INVALID, format!("{}: {e}", p.display()));
        }
        man.outputs.push(p.clone());
    }
    let summary = Summary {
        alpha: a.alpha,
        rho: out.config.rho,
        length: a.length,
        count: out.config.count(),
        seed: a.seed,
        iterations: out.iterations,
        converged: out.converged,
        grad_norm: out.grad_norm,
        energy_per_particle: out.config.energy_per_particle,
        s_alpha: s,
        gap_threshold: gap,
        clusters: report.clusters.len(),
        mean_spacing: report.mean_spacing,
        spacing_cv: report.spacing_cv,
        count_histogram: report.count_histogram,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("serialisable"));
    if let Err(e) = man.finish(manifest) {
        eprintln!("warning: manifest not written: {e}");
    }
    if out.converged {
        EXIT_OK
    } else {
        eprintln!("warning: gradient {:e} above tolerance after {} steps", out.grad_norm, out.iterations);
        EXIT_UNRESOLVED
    }
}
