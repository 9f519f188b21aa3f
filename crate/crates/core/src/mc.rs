//! Monte Carlo engine: particle positions, force maps, renormalized resultant
//! forces, empirical characteristic functions, tail fits and moments.
//!
//! Every replica draws from its own ChaCha8 stream keyed by (seed, replica),
//! so results are a pure function of the configuration and do not depend on
//! the number of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{AngularFunction, AngularShape};
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::renorm::{a_n_scheme, RenormScheme, SchemeKind};

/// Positions closer to the origin than this are redrawn.
pub const MIN_RADIUS: f64 = 1e-300;

/// Stream id reserved for the mean-field estimate.
const MEAN_FIELD_STREAM: u64 = u64::MAX;

/// Deterministic generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Law of the positions outside r_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outer {
    /// Uniform in volume on r_c ≤ |r| ≤ L, isotropic.
    UniformShell { l: f64 },
    /// Density ∝ |r|^{ν_out} on r_c ≤ |r| ≤ L, isotropic.
    PowerShell { nu_out: f64, l: f64 },
    None,
}

/// ρ(r) = g(r̂)|r|^ν for |r| < r_c, plus an outer component carrying the
/// remaining mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDensity {
    pub dim: usize,
    pub nu: f64,
    pub g: AngularFunction,
    pub r_c: f64,
    pub outer: Outer,
    inner_weight: f64,
}

/// Mass of the inner law: ∫ g dS · r_c^{d+ν} / (d+ν).
fn inner_mass(g: &AngularFunction, nu: f64, r_c: f64) -> f64 {
    let m = g.dim() as f64 + nu;
    g.total_mass() * r_c.powf(m) / m
}

impl SpatialDensity {
    pub fn new(nu: f64, g: AngularFunction, r_c: f64, outer: Outer) -> Result<Self> {
        let dim = g.dim();
        if !(nu > -(dim as f64)) {
            return invalid(format!("nu must exceed -d = {} (integrability at the origin)", -(dim as f64)));
        }
        if !(r_c > 0.0 && r_c.is_finite()) {
            return invalid("r_c must be positive");
        }
        match outer {
            Outer::UniformShell { l } | Outer::PowerShell { l, .. } if !(l > r_c && l.is_finite()) => {
                return invalid("outer shell needs L > r_c");
            }
            _ => {}
        }
        let w = inner_mass(&g, nu, r_c);
        if w > 1.0 + 1e-9 {
            return invalid(format!("inner mass {w} exceeds 1; rescale g"));
        }
        if outer == Outer::None && (w - 1.0).abs() > 1e-9 {
            return invalid(format!("without an outer component the inner mass must be 1 (got {w})"));
        }
        Ok(Self { dim, nu, g, r_c, outer, inner_weight: w.min(1.0) })
    }

    /// Rescales `g` so that the inner region carries probability `inner_weight`.
    pub fn with_inner_weight(nu: f64, g: &AngularFunction, r_c: f64, inner_weight: f64, outer: Outer) -> Result<Self> {
        if !(inner_weight > 0.0 && inner_weight <= 1.0) {
            return invalid("inner weight must lie in (0, 1]");
        }
        if !(nu > -(g.dim() as f64)) {
            return invalid(format!("nu must exceed -d = {} (integrability at the origin)", -(g.dim() as f64)));
        }
        let raw = inner_mass(g, nu, r_c);
        if !(raw > 0.0) {
            return invalid("angular density g has zero mass");
        }
        let mut d = Self::new(nu, g.scaled(inner_weight / raw)?, r_c, outer)?;
        d.inner_weight = inner_weight;
        Ok(d)
    }

    pub fn inner_weight(&self) -> f64 {
        self.inner_weight
    }

    pub fn outer_mass(&self) -> f64 {
        1.0 - self.inner_weight
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceLaw {
    pub delta: f64,
    pub kappa: f64,
    /// λ̄ of the exponentially damped law.
    pub damping: Option<f64>,
}

impl ForceLaw {
    pub fn power(delta: f64, kappa: f64) -> Result<Self> {
        let l = Self { delta, kappa, damping: None };
        l.validate()?;
        Ok(l)
    }

    pub fn damped(delta: f64, kappa: f64, lambda_bar: f64) -> Result<Self> {
        let l = Self { delta, kappa, damping: Some(lambda_bar) };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return invalid("delta must be non-negative");
        }
        if !self.kappa.is_finite() || self.kappa == 0.0 {
            return invalid("kappa must be finite and non-zero");
        }
        if let Some(l) = self.damping {
            if !(l >= 0.0) {
                return invalid("damping must be non-negative");
            }
            if !(self.delta > 1.0) {
                return invalid("the damped law needs delta > 1 (its tail amplitude is proportional to delta - 1)");
            }
        }
        Ok(())
    }

    pub fn sign_q(&self) -> f64 {
        self.kappa.signum()
    }
}

/// U(r): r̂/|r|^δ, or e^{−λ̄|r|}(λ̄|r| + δ − 1) r̂/|r|^δ when damped.
pub fn unit_force(position: &[f64], law: &ForceLaw) -> Result<Vec<f64>> {
    let r = norm(position);
    if !(r > 0.0) {
        return invalid("force is singular at |r| = 0");
    }
    let mag = force_magnitude(r, law);
    Ok(position.iter().map(|x| x / r * mag).collect())
}

/// κ·U(r).
pub fn force_map(position: &[f64], law: &ForceLaw) -> Result<Vec<f64>> {
    law.validate()?;
    Ok(unit_force(position, law)?.into_iter().map(|u| law.kappa * u).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub density: SpatialDensity,
    pub law: ForceLaw,
    pub scheme: RenormScheme,
    pub n_particles: u64,
    pub replicas: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        density: SpatialDensity,
        law: ForceLaw,
        scheme: RenormScheme,
        n_particles: u64,
        replicas: u64,
        seed: u64,
    ) -> Result<Self> {
        let c = Self { density, law, scheme, n_particles, replicas, seed };
        c.validate()?;
        Ok(c)
    }

    /// (d+ν)/δ; infinite for δ = 0.
    pub fn alpha(&self) -> f64 {
        if self.law.delta == 0.0 {
            f64::INFINITY
        } else {
            (self.density.dim as f64 + self.density.nu) / self.law.delta
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        self.scheme.validate()?;
        if self.n_particles < 1 || self.replicas < 1 {
            return invalid("need at least one particle and one replica");
        }
        let a = self.alpha();
        let same = if a.is_infinite() { self.scheme.alpha.is_infinite() } else { (a - self.scheme.alpha).abs() <= 1e-12 };
        if !same {
            return invalid(format!("scheme alpha {} differs from (d+nu)/delta = {a}", self.scheme.alpha));
        }
        Ok(())
    }

    /// Signed a_N = q·|a_N|.
    pub fn a_n(&self) -> Result<f64> {
        Ok(self.law.sign_q() * a_n_scheme(&self.scheme, self.n_particles)?)
    }
}

/// Fixed-size point; only the first `dim` components are used.
type Point = [f64; 3];

fn uniform_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
    match dim {
        1 => [if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0, 0.0],
        2 => loop {
            // Uniform point in the unit disk, projected (no trigonometry).
            let x = 2.0 * rng.gen::<f64>() - 1.0;
            let y = 2.0 * rng.gen::<f64>() - 1.0;
            let s = x * x + y * y;
            if s > 1e-12 && s < 1.0 {
                let r = s.sqrt();
                return [x / r, y / r, 0.0];
            }
        },
        _ => loop {
            // Marsaglia (1972) sphere point picking.
            let x = 2.0 * rng.gen::<f64>() - 1.0;
            let y = 2.0 * rng.gen::<f64>() - 1.0;
            let s = x * x + y * y;
            if s < 1.0 {
                let t = 2.0 * (1.0 - s).sqrt();
                return [x * t, y * t, 1.0 - 2.0 * s];
            }
        },
    }
}

fn direction_from_g<R: Rng + ?Sized>(g: &AngularFunction, rng: &mut R) -> Result<Point> {
    let dim = g.dim();
    if matches!(g.shape(), AngularShape::Uniform { .. }) {
        return Ok(uniform_direction(dim, rng));
    }
    let sup = g.sup_bound();
    for _ in 0..1_000_000 {
        let u = uniform_direction(dim, rng);
        let val = g.eval_raw(&u[..dim]);
        if val > sup * (1.0 + 1e-12) {
            return Err(Error::Sampling(format!("g = {val} exceeds its declared bound {sup}")));
        }
        if rng.gen::<f64>() * sup < val {
            return Ok(u);
        }
    }
    Err(Error::Sampling("rejection sampling of g did not accept in 10^6 proposals".into()))
}

/// Radius with density ∝ r^{m−1} on [lo, hi] (lo may be 0 when m > 0).
fn power_radius<R: Rng + ?Sized>(m: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    let u = 1.0 - rng.gen::<f64>(); // (0, 1]
    if m.abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else if lo == 0.0 {
        hi * match m {
            1.0 => u,
            2.0 => u.sqrt(),
            3.0 => u.cbrt(),
            _ => u.powf(1.0 / m),
        }
    } else {
        (lo.powf(m) + u * (hi.powf(m) - lo.powf(m))).powf(1.0 / m)
    }
}

// Kept out of line so that its powf calls are not hoisted into the hot path.
#[inline(never)]
fn outer_radius<R: Rng + ?Sized>(density: &SpatialDensity, rng: &mut R) -> f64 {
    let d = density.dim as f64;
    match density.outer {
        Outer::UniformShell { l } => power_radius(d, density.r_c, l, rng),
        Outer::PowerShell { nu_out, l } => power_radius(d + nu_out, density.r_c, l, rng),
        Outer::None => unreachable!("no outer mass"),
    }
}

fn sample_point<R: Rng + ?Sized>(density: &SpatialDensity, rng: &mut R) -> Result<Point> {
    let d = density.dim as f64;
    loop {
        let inner = density.inner_weight >= 1.0 || rng.gen::<f64>() < density.inner_weight;
        let (r, dir) = if inner {
            (power_radius(d + density.nu, 0.0, density.r_c, rng), direction_from_g(&density.g, rng)?)
        } else {
            (outer_radius(density, rng), uniform_direction(density.dim, rng))
        };
        if r >= MIN_RADIUS {
            return Ok(dir.map(|c| c * r));
        }
    }
}

/// |U| at distance r (before the unit vector).
fn force_magnitude(r: f64, law: &ForceLaw) -> f64 {
    let mut mag = if law.delta == 0.0 {
        1.0
    } else if law.delta == 2.0 {
        1.0 / (r * r)
    } else if law.delta == 1.0 {
        1.0 / r
    } else if law.delta == 0.5 {
        1.0 / r.sqrt()
    } else {
        r.powf(-law.delta)
    };
    if let Some(l) = law.damping {
        mag *= (-l * r).exp() * (l * r + law.delta - 1.0);
    }
    mag
}

fn unit_force_point(p: &Point, dim: usize, law: &ForceLaw) -> Point {
    let r = norm(&p[..dim]);
    let s = force_magnitude(r, law) / r;
    p.map(|c| c * s)
}

/// `n` i.i.d. positions.
pub fn sample_positions<R: Rng + ?Sized>(density: &SpatialDensity, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    (0..n).map(|_| sample_point(density, rng).map(|p| p[..density.dim].to_vec())).collect()
}

/// `n` i.i.d. draws of U = U(R).
pub fn sample_unit_forces<R: Rng + ?Sized>(
    density: &SpatialDensity,
    law: &ForceLaw,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let d = density.dim;
    (0..n)
        .map(|_| sample_point(density, rng).map(|p| unit_force_point(&p, d, law)[..d].to_vec()))
        .collect()
}

/// a_N · Σ_{i≤N} U_i for one replica.
pub fn resultant_force(config: &SimConfig, replica: u64) -> Result<Vec<f64>> {
    if replica >= config.replicas {
        return invalid(format!("replica {replica} out of range (replicas = {})", config.replicas));
    }
    config.validate()?;
    let a = config.a_n()?;
    raw_sum(config, replica).map(|s| s.into_iter().map(|x| a * x).collect())
}

fn raw_sum(config: &SimConfig, replica: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(config.seed, replica);
    let d = config.density.dim;
    let mut acc = [0.0; 3];
    for _ in 0..config.n_particles {
        let u = unit_force_point(&sample_point(&config.density, &mut rng)?, d, &config.law);
        for k in 0..3 {
            acc[k] += u[k];
        }
    }
    Ok(acc[..d].to_vec())
}

/// All replicas of [`resultant_force`], evaluated in parallel; the result is
/// ordered by replica index.
pub fn resultant_forces(config: &SimConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let a = config.a_n()?;
    (0..config.replicas)
        .into_par_iter()
        .map(|k| raw_sum(config, k).map(|s| s.into_iter().map(|x| a * x).collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCf {
    pub grid: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub replicas_used: usize,
    pub stderr: Vec<f64>,
}

/// (1/m) Σ_k exp(i z·F_k) with standard errors √((1 − |φ̂|²)/(m − 1)).
pub fn empirical_cf(forces: &[Vec<f64>], grid: &[Vec<f64>]) -> Result<EmpiricalCf> {
    if grid.is_empty() {
        return invalid("empty z-grid");
    }
    if forces.len() < 2 {
        return invalid("need at least two force samples");
    }
    let d = forces[0].len();
    if let Some(f) = forces.iter().find(|f| f.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: f.len() });
    }
    if let Some(z) = grid.iter().find(|z| z.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: z.len() });
    }
    let m = forces.len() as f64;
    let (values, stderr): (Vec<Complex64>, Vec<f64>) = grid
        .par_iter()
        .map(|z| {
            if z.iter().all(|c| *c == 0.0) {
                return (Complex64::new(1.0, 0.0), 0.0);
            }
            let s: Complex64 = forces.iter().map(|f| Complex64::new(0.0, dot(z, f)).exp()).sum();
            let phi = s / m;
            let var = ((1.0 - phi.norm_sqr()) * m / (m - 1.0)).max(0.0);
            (phi, (var / m).sqrt())
        })
        .unzip();
    Ok(EmpiricalCf { grid: grid.to_vec(), values, replicas_used: forces.len(), stderr })
}

/// Hill estimate of the tail index from the largest order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub alpha_hat: f64,
    pub stderr: f64,
    /// Fitted ∫C dS from P(|U| > u) ≈ (∫C dS / α) u^{−α} at the threshold.
    pub amplitude: f64,
    pub k: usize,
}

pub const MIN_TAIL_SAMPLES: usize = 10_000;

pub fn tail_exponent_fit(samples: &[f64], fit_fraction: f64) -> Result<TailFit> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return invalid(format!("tail fitting needs at least {MIN_TAIL_SAMPLES} samples (got {})", samples.len()));
    }
    if !(fit_fraction > 0.0 && fit_fraction <= 0.1) {
        return invalid("fit_fraction must lie in (0, 0.1]");
    }
    let n = samples.len();
    let k = (fit_fraction * n as f64).floor() as usize;
    if k < 10 {
        return invalid("too few tail points");
    }
    let mut top: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    let idx = n - k - 1;
    top.select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    let threshold = top[idx];
    if !(threshold > 0.0) {
        return invalid("tail threshold is zero");
    }
    let mut tail: Vec<f64> = top[idx + 1..].to_vec();
    tail.sort_by(|a, b| a.total_cmp(b));
    let lt = threshold.ln();
    let s: f64 = tail.iter().map(|x| x.ln() - lt).sum();
    let alpha_hat = k as f64 / s;
    let amplitude = alpha_hat * threshold.powf(alpha_hat) * k as f64 / n as f64;
    Ok(TailFit { alpha_hat, stderr: alpha_hat / (k as f64).sqrt(), amplitude, k })
}

/// Which full moments to estimate alongside the truncated ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MomentRequest {
    pub mean: bool,
    pub covariance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMoments {
    /// ⟨U⟩_{u_c} = E[U; |U| ≤ u_c].
    pub mean_u_uc: Vec<f64>,
    pub mean_u_uc_stderr: Vec<f64>,
    /// M̄_{u_c} = E[U Uᵀ; |U| ≤ u_c] − m mᵀ with m the full mean when it
    /// exists (α > 1), otherwise ⟨U⟩_{u_c}.
    pub mbar_uc: Matrix,
    pub mean_u: Option<Vec<f64>>,
    pub mean_u_stderr: Option<Vec<f64>>,
    pub mbar: Option<Matrix>,
    pub samples: usize,
}

pub fn truncated_moments<R: Rng + ?Sized>(
    density: &SpatialDensity,
    law: &ForceLaw,
    u_c: f64,
    samples: usize,
    request: MomentRequest,
    rng: &mut R,
) -> Result<TruncatedMoments> {
    law.validate()?;
    let alpha = if law.delta == 0.0 { f64::INFINITY } else { (density.dim as f64 + density.nu) / law.delta };
    if request.mean && alpha <= 1.0 {
        return invalid(format!("the mean of U is infinite for alpha = {alpha} <= 1"));
    }
    if request.covariance && alpha <= 2.0 {
        return invalid(format!("the covariance of U is infinite for alpha = {alpha} <= 2"));
    }
    if samples < 2 {
        return invalid("need at least two samples");
    }
    if !(u_c > 0.0) {
        return invalid("u_c must be positive");
    }
    let d = density.dim;
    let n = samples as f64;
    let mut s1 = vec![0.0; d];
    let mut s1sq = vec![0.0; d];
    let mut t1 = vec![0.0; d];
    let mut t1sq = vec![0.0; d];
    let mut t2 = vec![0.0; d * d];
    let mut f2 = vec![0.0; d * d];
    for _ in 0..samples {
        let u = unit_force_point(&sample_point(density, rng)?, d, law);
        let inside = norm(&u) <= u_c;
        for i in 0..d {
            s1[i] += u[i];
            s1sq[i] += u[i] * u[i];
            if inside {
                t1[i] += u[i];
                t1sq[i] += u[i] * u[i];
            }
            for j in 0..d {
                f2[i * d + j] += u[i] * u[j];
                if inside {
                    t2[i * d + j] += u[i] * u[j];
                }
            }
        }
    }
    let se = |s: &[f64], sq: &[f64]| -> Vec<f64> {
        s.iter().zip(sq).map(|(a, b)| ((b / n - (a / n).powi(2)).max(0.0) / (n - 1.0)).sqrt()).collect()
    };
    let mean_uc: Vec<f64> = t1.iter().map(|x| x / n).collect();
    let mean_full: Vec<f64> = s1.iter().map(|x| x / n).collect();
    let centre = if alpha > 1.0 { &mean_full } else { &mean_uc };
    let mut mbar_uc = Matrix::zeros(d);
    let mut mbar = Matrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            mbar_uc.set(i, j, t2[i * d + j] / n - centre[i] * centre[j]);
            mbar.set(i, j, f2[i * d + j] / n - mean_full[i] * mean_full[j]);
        }
    }
    Ok(TruncatedMoments {
        mean_u_uc_stderr: se(&t1, &t1sq),
        mean_u_uc: mean_uc,
        mbar_uc,
        mean_u_stderr: request.mean.then(|| se(&s1, &s1sq)),
        mean_u: request.mean.then_some(mean_full),
        mbar: request.covariance.then_some(mbar),
        samples,
    })
}

/// qK·(sample mean of U) from `samples` draws on a dedicated stream.
pub fn mean_field_estimate(config: &SimConfig, samples: usize) -> Result<Vec<f64>> {
    config.validate()?;
    let alpha = config.alpha();
    if alpha <= 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "alpha = {alpha} <= 1: the random force has no finite mean, so there is no mean field"
        )));
    }
    let vlasov_like = matches!(
        config.scheme.kind,
        SchemeKind::VlasovAn | SchemeKind::Scale | SchemeKind::PhysicalFixedSize | SchemeKind::PhysicalFixedForce
    );
    if !vlasov_like {
        return invalid("the mean-field estimate needs a Vlasov-type scheme");
    }
    let mut rng = stream_rng(config.seed, MEAN_FIELD_STREAM);
    let m = truncated_moments(
        &config.density,
        &config.law,
        f64::INFINITY,
        samples,
        MomentRequest { mean: true, covariance: false },
        &mut rng,
    )?;
    let qk = config.law.sign_q() * config.scheme.k;
    Ok(m.mean_u.expect("requested").into_iter().map(|x| qk * x).collect())
}

/// Tensor grid with `points` nodes per axis on [−half_width, half_width]^d.
pub fn tensor_grid(dim: usize, half_width: f64, points: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = if points <= 1 {
        vec![0.0]
    } else {
        (0..points).map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64).collect()
    };
    let mut grid = vec![vec![]];
    for _ in 0..dim {
        grid = grid
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                axis.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(*x);
                    q
                })
            })
            .collect();
    }
    grid
}

/// Rays along the coordinate axes and diagonals, `radii` points on (0, r_max].
pub fn radial_grid(dim: usize, r_max: f64, radii: usize) -> Vec<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..8).map(|k| (k as f64 * PI / 4.0).sin_cos()).map(|(s, c)| vec![c, s]).collect(),
        _ => {
            let mut v = vec![];
            for s in [1.0, -1.0] {
                v.push(vec![s, 0.0, 0.0]);
                v.push(vec![0.0, s, 0.0]);
                v.push(vec![0.0, 0.0, s]);
            }
            let r = 1.0 / 3f64.sqrt();
            for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, -1.0), (1.0, 1.0, -1.0)] {
                v.push(vec![a * r, b * r, c * r]);
            }
            v
        }
    };
    let mut grid = vec![vec![0.0; dim]];
    for d in &dirs {
        for i in 1..=radii {
            let t = r_max * i as f64 / radii as f64;
            grid.push(d.iter().map(|c| c * t).collect());
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::Direction;

    fn ball(dim: usize, nu: f64) -> SpatialDensity {
        SpatialDensity::with_inner_weight(nu, &AngularFunction::uniform(dim, 1.0).unwrap(), 1.0, 1.0, Outer::None)
            .unwrap()
    }

    #[test]
    fn force_map_examples() {
        let sign = ForceLaw::power(0.0, 1.0).unwrap();
        assert_eq!(force_map(&[-3.0], &sign).unwrap(), vec![-1.0]);
        let inv_sq = ForceLaw::power(2.0, 1.0).unwrap();
        assert_eq!(force_map(&[2.0, 0.0, 0.0], &inv_sq).unwrap(), vec![0.25, 0.0, 0.0]);
        let damped = ForceLaw::damped(2.0, 1.0, 1.0).unwrap();
        let f = force_map(&[1.0, 0.0, 0.0], &damped).unwrap();
        assert!((f[0] - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(force_map(&[0.0, 0.0], &inv_sq).is_err());
        assert!(ForceLaw::damped(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn density_normalization() {
        let d = ball(3, 0.0);
        assert!((d.inner_weight() - 1.0).abs() < 1e-12);
        let g = AngularFunction::uniform(3, 1.0).unwrap();
        assert!(SpatialDensity::new(0.0, g.clone(), 1.0, Outer::None).is_err());
        assert!(SpatialDensity::new(-3.0, g.clone(), 1.0, Outer::UniformShell { l: 10.0 }).is_err());
        let half = SpatialDensity::with_inner_weight(0.0, &g, 1.0, 0.5, Outer::UniformShell { l: 10.0 }).unwrap();
        assert!((half.outer_mass() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_streams() {
        let cfg = SimConfig::new(
            ball(3, 0.0),
            ForceLaw::power(2.0, 1.0).unwrap(),
            RenormScheme::new(SchemeKind::FluctuationHighAlpha, 1.5, 1.0).unwrap(),
            50,
            8,
            42,
        )
        .unwrap();
        let a = resultant_forces(&cfg).unwrap();
        let b: Vec<Vec<f64>> = (0..8).map(|k| resultant_force(&cfg, k).unwrap()).collect();
        assert_eq!(a, b);
        assert!(resultant_force(&cfg, 8).is_err());
    }

    #[test]
    fn single_particle_resultant_is_force_map() {
        let law = ForceLaw::power(2.0, 1.0).unwrap();
        let cfg = SimConfig::new(
            ball(3, 0.0),
            law,
            RenormScheme::new(SchemeKind::VlasovAn, 1.5, 1.0).unwrap(),
            1,
            2,
            7,
        )
        .unwrap();
        let pos = sample_positions(&cfg.density, 1, &mut stream_rng(7, 0)).unwrap();
        let f = force_map(&pos[0], &law).unwrap();
        let r = resultant_force(&cfg, 0).unwrap();
        for (x, y) in f.iter().zip(&r) {
            assert!((x - y).abs() <= 1e-15 * x.abs());
        }
    }

    #[test]
    fn ecf_trivial_cases() {
        let forces = vec![vec![0.7, -0.2]; 5];
        let e = empirical_cf(&forces, &[vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(e.values[0], Complex64::new(1.0, 0.0));
        assert!((e.values[1].norm() - 1.0).abs() < 1e-14);
        let sym = vec![vec![1.3], vec![-1.3]];
        let e = empirical_cf(&sym, &[vec![0.4]]).unwrap();
        assert!(e.values[0].im.abs() < 1e-16);
        assert!((e.values[0].re - (0.4f64 * 1.3).cos()).abs() < 1e-15);
        assert!(empirical_cf(&sym, &[]).is_err());
        assert!(empirical_cf(&sym[..1], &[vec![1.0]]).is_err());
    }

    #[test]
    fn tail_fit_guards() {
        assert!(tail_exponent_fit(&[1.0; 100], 0.05).is_err());
        assert!(tail_exponent_fit(&vec![1.0; 20_000], 0.5).is_err());
    }

    #[test]
    fn rejection_sampling_follows_g() {
        let g = AngularFunction::dipole(1.0, 1.0, Direction::axis(3, 2).unwrap()).unwrap();
        let d = SpatialDensity::with_inner_weight(0.0, &g, 1.0, 1.0, Outer::None).unwrap();
        let pos = sample_positions(&d, 20_000, &mut stream_rng(1, 0)).unwrap();
        // E[ẑ·r̂] under 1 + cos θ is 1/3.
        let m: f64 = pos.iter().map(|p| p[2] / norm(p)).sum::<f64>() / pos.len() as f64;
        assert!((m - 1.0 / 3.0).abs() < 0.02, "{m}");
    }

    #[test]
    fn moments_guard_thresholds() {
        let d = ball(3, 0.0);
        let law = ForceLaw::power(2.0, 1.0).unwrap();
        let mut rng = stream_rng(3, 0);
        let req = MomentRequest { mean: false, covariance: true };
        assert!(truncated_moments(&d, &law, 1.0, 100, req, &mut rng).is_err());
    }

    #[test]
    fn grids() {
        let g = tensor_grid(2, 5.0, 21);
        assert_eq!(g.len(), 441);
        assert!(g.iter().any(|z| z == &vec![0.0, 0.0]));
        let r = radial_grid(3, 3.0, 10);
        assert_eq!(r.len(), 1 + 10 * 10);
    }
}
