//! Periodic particle systems under `f(x) = 1/(1 + x^a)`: relaxation,
//! cluster statistics and text exports.
//!
//! Plain binary64 throughout; nothing here is certified.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::potential::{validate_alpha, PotentialContext, PotentialError};

/// Default gradient tolerance for [`relax`], on the force `-dE_total/dx_i`
/// in units of [`force_scale`].
pub const RELAX_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    Potential(PotentialError),
    /// `rho * L` is not an integer.
    Density { rho: f64, length: f64 },
    /// Cell length, iteration count or cluster threshold is not positive.
    Parameter(&'static str),
    /// A CSV line did not parse as a coordinate.
    Parse { line: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Potential(e) => write!(f, "{e}"),
            SimError::Density { rho, length } => write!(f, "rho * L = {} is not an integer", rho * length),
            SimError::Parameter(m) => write!(f, "invalid parameter: {m}"),
            SimError::Parse { line } => write!(f, "line {line} is not a number"),
        }
    }
}

impl From<PotentialError> for SimError {
    fn from(e: PotentialError) -> SimError {
        SimError::Potential(e)
    }
}

/// Particles on the circle `[0, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    /// Sorted, each in `[0, L)`.
    pub positions: Vec<f64>,
    pub length: f64,
    pub alpha: u32,
    /// `count / L`.
    pub rho: f64,
    pub seed: u64,
    pub energy_per_particle: f64,
}

impl Configuration {
    /// Sorts and wraps `positions` and computes the energy.
    pub fn new(alpha: u32, length: f64, mut positions: Vec<f64>, seed: u64) -> Result<Configuration, SimError> {
        validate_alpha(alpha)?;
        if !(length > 0.0 && length.is_finite()) {
            return Err(SimError::Parameter("cell length must be positive"));
        }
        for p in positions.iter_mut() {
            *p = wrap(*p, length);
        }
        positions.sort_by(f64::total_cmp);
        let mut c = Configuration {
            rho: positions.len() as f64 / length,
            positions,
            length,
            alpha,
            seed,
            energy_per_particle: 0.0,
        };
        c.energy_per_particle = periodic_energy(&c, image_cutoff(length));
        Ok(c)
    }

    pub fn count(&self) -> usize {
        self.positions.len()
    }
}

fn wrap(x: f64, l: f64) -> f64 {
    let y = x - l * libm::floor(x / l);
    if y >= l || y < 0.0 {
        0.0
    } else {
        y
    }
}

/// `ceil(12/L) + 2`.
pub fn image_cutoff(length: f64) -> u32 {
    libm::ceil(12.0 / length) as u32 + 2
}

/// Number of particles for density `rho` on a cell of length `L`.
pub fn particle_count(rho: f64, length: f64) -> Result<usize, SimError> {
    let x = rho * length;
    let n = libm::round(x);
    if !(x.is_finite() && n >= 0.0) || (x - n).abs() > 1e-9 * n.max(1.0) {
        return Err(SimError::Density { rho, length });
    }
    Ok(n as usize)
}

fn pot(alpha: u32, r: f64) -> f64 {
    1.0 / (1.0 + powi(r, alpha))
}

/// `f'(r)` for `r >= 0`.
fn dpot(alpha: u32, r: f64) -> f64 {
    let ra1 = powi(r, alpha - 1);
    let f = 1.0 / (1.0 + ra1 * r);
    -(alpha as f64) * ra1 * f * f
}

fn powi(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = x;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// Minimum-image displacement in `[-L/2, L/2]`.
fn min_image(d: f64, l: f64) -> f64 {
    d - l * libm::round(d / l)
}

/// `(1/count) sum_i sum_{(j,k) != (i,0)} f(|x_i - x_j + kL|)` with the
/// images `|k| <= K` taken around the minimum image of each pair.
pub fn periodic_energy(cfg: &Configuration, image_cutoff: u32) -> f64 {
    energy_of(cfg.alpha, cfg.length, &cfg.positions, image_cutoff.max(1))
}

fn pair_sum(alpha: u32, l: f64, d: f64, k: i64) -> f64 {
    let mut s = 0.0;
    for j in -k..=k {
        s += pot(alpha, (d + j as f64 * l).abs());
    }
    s
}

fn pair_force(alpha: u32, l: f64, d: f64, k: i64) -> f64 {
    let mut s = 0.0;
    for j in -k..=k {
        let r = d + j as f64 * l;
        s += dpot(alpha, r.abs()) * r.signum();
    }
    s
}

fn energy_of(alpha: u32, l: f64, x: &[f64], k: u32) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let k = k as i64;
    let mut self_img = 0.0;
    for j in 1..=k {
        self_img += 2.0 * pot(alpha, j as f64 * l);
    }
    let mut acc = n as f64 * self_img;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += pair_sum(alpha, l, min_image(x[i] - x[j], l), k);
        }
        acc += 2.0 * row;
    }
    acc / n as f64
}

/// `dE_total/dx_i` with `E_total = count * energy_per_particle / 2`.
fn gradient(alpha: u32, l: f64, x: &[f64], k: u32, g: &mut [f64]) {
    let k = k as i64;
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let d = min_image(x[i] - x[j], l);
            let p = pair_force(alpha, l, d, k);
            g[i] += p;
            g[j] -= p;
        }
    }
}

fn max_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxParams {
    pub alpha: u32,
    pub count: usize,
    pub length: f64,
    pub seed: u64,
    pub iters: u32,
    pub tol: f64,
}

impl RelaxParams {
    /// Density form; `rho * length` must be an integer.
    pub fn from_density(alpha: u32, rho: f64, length: f64, seed: u64, iters: u32) -> Result<RelaxParams, SimError> {
        Ok(RelaxParams {
            alpha,
            count: particle_count(rho, length)?,
            length,
            seed,
            iters,
            tol: RELAX_TOL,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxOutcome {
    pub config: Configuration,
    pub iterations: u32,
    /// Max-norm of the final gradient of the total energy, in absolute units.
    pub grad_norm: f64,
    pub converged: bool,
    /// Energy per particle after each accepted step, starting with the initial one.
    pub energy_trace: Vec<f64>,
}

/// Gradient descent from uniform random positions, with Barzilai-Borwein
/// trial steps and Armijo backtracking. Steps that would raise the energy
/// are never accepted.
pub fn relax(p: &RelaxParams) -> Result<RelaxOutcome, SimError> {
    validate_alpha(p.alpha)?;
    if !(p.length > 0.0 && p.length.is_finite()) {
        return Err(SimError::Parameter("cell length must be positive"));
    }
    if p.iters == 0 {
        return Err(SimError::Parameter("iteration count must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let start: Vec<f64> = (0..p.count).map(|_| rng.gen_range(0.0..p.length)).collect();
    relax_from(p, start)
}

/// Typical force between neighbours, `max(1, L/count)^-(a+1)`; tolerances
/// and step bounds are relative to it so dilute systems still relax.
pub fn force_scale(alpha: u32, length: f64, count: usize) -> f64 {
    let gap = if count > 0 { length / count as f64 } else { length };
    1.0 / powi(gap.max(1.0), alpha + 1)
}

/// Bound on the force per particle lost by keeping only the images `|k| <= K`
/// around each minimum image; gradients below it are not resolved.
pub fn truncation_force_bound(alpha: u32, length: f64, count: usize, image_cutoff: u32) -> f64 {
    let r = (image_cutoff as f64 + 0.5) * length;
    // per side: first missing term plus the integral of a / r^(a+1) beyond it
    let side = alpha as f64 / powi(r, alpha + 1) + 1.0 / (length * powi(r, alpha));
    2.0 * side * count.saturating_sub(1) as f64
}

/// [`relax`] from given starting positions.
pub fn relax_from(p: &RelaxParams, start: Vec<f64>) -> Result<RelaxOutcome, SimError> {
    let (a, l) = (p.alpha, p.length);
    let k = image_cutoff(l);
    let n = start.len();
    let mut x: Vec<f64> = start.into_iter().map(|v| wrap(v, l)).collect();
    let mut g = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut e = energy_of(a, l, &x, k);
    let mut trace = vec![e];
    gradient(a, l, &x, k, &mut g);
    let fs = force_scale(a, l, n);
    let target = (p.tol * fs).max(truncation_force_bound(a, l, n, k));
    let mut step = 0.1 / fs;
    let mut it = 0;
    // descent acts on the per-particle energy, whose gradient is 2g/n
    let scale = if n > 0 { 2.0 / n as f64 } else { 0.0 };
    while it < p.iters && max_norm(&g) > target {
        it += 1;
        let gg: f64 = g.iter().map(|v| v * v).sum::<f64>() * scale;
        let mut t = step;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = x[i] - t * g[i];
            }
            let e_new = energy_of(a, l, &trial, k);
            if e_new <= e - 1e-4 * t * gg {
                accepted = true;
                gradient(a, l, &trial, k, &mut g_new);
                // Barzilai-Borwein: s.s / s.y with s = -t g, y = g_new - g
                let sy: f64 = (0..n).map(|i| -t * g[i] * (g_new[i] - g[i])).sum();
                let ss = t * t * g.iter().map(|v| v * v).sum::<f64>();
                step = if sy > 0.0 { (ss / sy).clamp(1e-6 / fs, 1e3 / fs) } else { (2.0 * t).min(1e3 / fs) };
                e = e_new;
                core::mem::swap(&mut g, &mut g_new);
                for i in 0..n {
                    x[i] = wrap(trial[i], l);
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(e);
    }
    let grad_norm = max_norm(&g);
    let mut config = Configuration::new(a, l, x, p.seed)?;
    config.energy_per_particle = e;
    Ok(RelaxOutcome {
        config,
        iterations: it,
        grad_norm,
        converged: grad_norm <= target,
        energy_trace: trace,
    })
}

/// `n` particles at each of `0, s, ..., (m-1)s` on a cell of length `m s`,
/// with `s` the midpoint of the context's spacing enclosure.
pub fn theorem_configuration(ctx: &PotentialContext, n: usize, m: usize) -> Result<Configuration, SimError> {
    if n == 0 || m < 2 {
        return Err(SimError::Parameter("need n >= 1 and m >= 2"));
    }
    let s = ctx.s_alpha.mid();
    let pos = (0..m).flat_map(|r| core::iter::repeat_n(r as f64 * s, n)).collect();
    Configuration::new(ctx.alpha, m as f64 * s, pos, 0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster {
    pub center: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport {
    /// Sorted by center.
    pub clusters: Vec<Cluster>,
    /// Mean circular gap between successive centers; absent below two clusters.
    pub mean_spacing: Option<f64>,
    pub spacing_cv: Option<f64>,
    /// `(cluster size, number of clusters)`, ascending in size.
    pub count_histogram: Vec<(usize, usize)>,
}

/// Single-linkage clusters on the circle: neighbours closer than
/// `gap_threshold` share a cluster.
pub fn detect_clusters(cfg: &Configuration, gap_threshold: f64) -> Result<ClusterReport, SimError> {
    if !(gap_threshold > 0.0) {
        return Err(SimError::Parameter("gap threshold must be positive"));
    }
    let x = &cfg.positions;
    let l = cfg.length;
    let n = x.len();
    let mut clusters = Vec::new();
    if n > 0 {
        let gap = |i: usize| if i + 1 < n { x[i + 1] - x[i] } else { x[0] + l - x[n - 1] };
        let first_break = (0..n).find(|&i| gap(i) > gap_threshold);
        let begin = first_break.map_or(0, |b| (b + 1) % n);
        let (mut sum, mut cnt, mut shift) = (0.0, 0usize, 0.0);
        for step in 0..n {
            let i = (begin + step) % n;
            if step > 0 && i == 0 {
                shift = l;
            }
            sum += x[i] + shift;
            cnt += 1;
            let cut = step + 1 == n || gap(i) > gap_threshold;
            if cut {
                clusters.push(Cluster {
                    center: wrap(sum / cnt as f64, l),
                    count: cnt,
                });
                sum = 0.0;
                cnt = 0;
            }
        }
        clusters.sort_by(|a, b| a.center.total_cmp(&b.center));
    }
    let m = clusters.len();
    let (mean_spacing, spacing_cv) = if m >= 2 {
        let gaps: Vec<f64> = (0..m)
            .map(|i| {
                if i + 1 < m {
                    clusters[i + 1].center - clusters[i].center
                } else {
                    clusters[0].center + l - clusters[m - 1].center
                }
            })
            .collect();
        let mean = gaps.iter().sum::<f64>() / m as f64;
        let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / m as f64;
        (Some(mean), Some(libm::sqrt(var) / mean))
    } else {
        (None, None)
    };
    let mut hist = BTreeMap::new();
    for c in &clusters {
        *hist.entry(c.count).or_insert(0usize) += 1;
    }
    Ok(ClusterReport {
        clusters,
        mean_spacing,
        spacing_cv,
        count_histogram: hist.into_iter().collect(),
    })
}

/// Header `position`, one coordinate per line, 17 significant digits.
pub fn csv_string(cfg: &Configuration) -> String {
    let mut s = String::from("position\n");
    for p in &cfg.positions {
        let _ = writeln!(s, "{p:.16e}");
    }
    s
}

/// Inverse of [`csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<f64>, SimError> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse::<f64>().map_err(|_| SimError::Parse { line: i + 1 }))
        .collect()
}

/// Number line over `[-L/2, L/2]` with one disc per cluster, radius `0.1 sqrt(count)`.
pub fn svg_string(cfg: &Configuration, report: &ClusterReport) -> String {
    let l = cfg.length;
    let h = l / 2.0;
    let vb_h = l * 120.0 / 900.0;
    let stroke = l / 900.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="900" height="120" viewBox="{} {} {} {}">"#,
        -h,
        -vb_h / 2.0,
        l,
        vb_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="0" x2="{}" y2="0" stroke="black" stroke-width="{}"/>"#,
        -h, h, stroke
    );
    let ticks = libm::floor(h) as i64;
    let step = if ticks > 20 { 5 } else { 1 };
    let font = vb_h / 8.0;
    for t in (-ticks..=ticks).filter(|t| t % step == 0) {
        let _ = writeln!(
            s,
            r#"<line x1="{t}" y1="0" x2="{t}" y2="{}" stroke="black" stroke-width="{}"/>"#,
            vb_h / 20.0,
            stroke
        );
        let _ = writeln!(
            s,
            r#"<text x="{t}" y="{}" font-size="{}" text-anchor="middle">{t}</text>"#,
            vb_h / 20.0 + font,
            font
        );
    }
    for c in &report.clusters {
        let x = if c.center >= h { c.center - l } else { c.center };
        let r = 0.1 * libm::sqrt(c.count as f64);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="0" r="{r}" fill="black"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
