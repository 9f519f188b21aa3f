//! Canonical characteristic-function pieces Ξ_α, the limit laws of the
//! renormalized resultant force, and the Lévy–Khintchine stable form.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{a_alpha, b_alpha, d_alpha, drift_vector_v, gaussian_matrix_m, AngularFunction, Direction};
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, scaled, Matrix};
use crate::renorm::solve_singular;
use crate::tail::{EULER_GAMMA, INTEGER_TOL};

/// α interval of a limit law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    StableSub1,
    Singular1,
    Stable12,
    Singular2,
    Gauss,
}

impl Regime {
    pub fn classify(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || alpha.is_nan() {
            return invalid(format!("alpha must be positive (got {alpha})"));
        }
        Ok(if (alpha - 1.0).abs() < INTEGER_TOL {
            Regime::Singular1
        } else if (alpha - 2.0).abs() < INTEGER_TOL {
            Regime::Singular2
        } else if alpha < 1.0 {
            Regime::StableSub1
        } else if alpha < 2.0 {
            Regime::Stable12
        } else {
            Regime::Gauss
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::StableSub1 => "StableSub1",
            Regime::Singular1 => "Singular1",
            Regime::Stable12 => "Stable12",
            Regime::Singular2 => "Singular2",
            Regime::Gauss => "Gauss",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// α, C(û) and the moments a limit law needs.
///
/// `mean_u` / `cov_mbar` are the full mean ⟨U⟩ and covariance M̄ (finite only
/// for α > 1 and α > 2 respectively); `truncated_mean` / `truncated_cov` are
/// ⟨U⟩_{u_c} and M̄_{u_c}, needed by Ξ₁ and Ξ₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableLawSpec {
    pub alpha: f64,
    pub angular: AngularFunction,
    /// K for the force-mode laws; unused by the CLT limits.
    pub dispersion: f64,
    pub regime: Regime,
    pub sign_q: f64,
    pub mean_u: Option<Vec<f64>>,
    pub cov_mbar: Option<Matrix>,
    pub truncated_mean: Option<Vec<f64>>,
    pub truncated_cov: Option<Matrix>,
    pub u_c: f64,
}

impl StableLawSpec {
    pub fn new(alpha: f64, angular: AngularFunction, dispersion: f64) -> Result<Self> {
        let spec = Self {
            alpha,
            regime: Regime::classify(alpha)?,
            angular,
            dispersion,
            sign_q: 1.0,
            mean_u: None,
            cov_mbar: None,
            truncated_mean: None,
            truncated_cov: None,
            u_c: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_sign_q(mut self, q: f64) -> Result<Self> {
        self.sign_q = q;
        self.validate()?;
        Ok(self)
    }

    pub fn with_u_c(mut self, u_c: f64) -> Result<Self> {
        self.u_c = u_c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mean(mut self, mean: Vec<f64>) -> Result<Self> {
        self.mean_u = Some(mean);
        self.validate()?;
        Ok(self)
    }

    pub fn with_cov(mut self, cov: Matrix) -> Result<Self> {
        self.cov_mbar = Some(cov);
        self.validate()?;
        Ok(self)
    }

    pub fn with_truncated_mean(mut self, mean: Vec<f64>) -> Result<Self> {
        self.truncated_mean = Some(mean);
        self.validate()?;
        Ok(self)
    }

    pub fn with_truncated_cov(mut self, cov: Matrix) -> Result<Self> {
        self.truncated_cov = Some(cov);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.angular.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if Regime::classify(self.alpha)? != self.regime {
            return invalid(format!("regime {} inconsistent with alpha = {}", self.regime, self.alpha));
        }
        if !(self.dispersion > 0.0 && self.dispersion.is_finite()) {
            return invalid("dispersion must be positive");
        }
        if self.sign_q != 1.0 && self.sign_q != -1.0 {
            return invalid("sign_q must be +1 or -1");
        }
        if !(self.u_c > 0.0) {
            return invalid("u_c must be positive");
        }
        if self.mean_u.is_some() && self.alpha <= 1.0 {
            return invalid("the mean of U exists only for alpha > 1");
        }
        if self.cov_mbar.is_some() && self.alpha <= 2.0 {
            return invalid("the covariance of U exists only for alpha > 2");
        }
        for v in [&self.mean_u, &self.truncated_mean].into_iter().flatten() {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        for m in [&self.cov_mbar, &self.truncated_cov].into_iter().flatten() {
            if m.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: m.dim() });
            }
            if !m.is_symmetric(1e-12) {
                return invalid("covariance matrices must be symmetric");
            }
        }
        if let Some(m) = &self.cov_mbar {
            if !m.is_psd(1e-12) {
                return invalid("covariance matrix must be positive semidefinite");
            }
        }
        Ok(())
    }

    fn require_mean(&self) -> Result<&[f64]> {
        self.mean_u
            .as_deref()
            .ok_or_else(|| Error::MissingMoment(format!("<U> is required for alpha = {}", self.alpha)))
    }

    fn require_cov(&self) -> Result<&Matrix> {
        self.cov_mbar
            .as_ref()
            .ok_or_else(|| Error::MissingMoment(format!("covariance of U is required for alpha = {}", self.alpha)))
    }
}

/// A characteristic-function value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfValue {
    pub value: Complex64,
}

impl CfValue {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// Which renormalization produced the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LimitMode {
    /// a_N, b_N of the generalized central limit theorem.
    Clt,
    /// Mean-field scaling (|a_N| = K/N, or −N|a_N|ln|a_N| = K at α = 1).
    Vlasov { n: u64 },
    /// Fixed-dispersion scaling (N|a_N|^α = K and its α ≥ 2 variants).
    Fluctuation { n: u64 },
}

/// Law of the limit random vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitLaw {
    /// S_α, 0 < α < 2, α ≠ 1.
    Stable,
    /// S₁⁽⁰⁾: symmetric α = 1 (Cauchy-type).
    Cauchy,
    /// S₁⁽¹⁾: asymmetric α = 1 semi-stable law.
    SemiStable,
    /// S₂*: Gaussian governed by the angular matrix M.
    GaussianLog,
    /// S₂: Gaussian governed by the covariance M̄.
    Gaussian,
}

/// Drift, dispersion and limit-law tag of F_res^N for large N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub drift: Vec<f64>,
    pub sigma_n: f64,
    pub law: LimitLaw,
}

fn split(z: &[f64]) -> Option<(f64, Direction)> {
    let r = norm(z);
    if r == 0.0 {
        None
    } else {
        Some((r, Direction::normalize(z).expect("non-zero vector")))
    }
}

fn check_z(spec: &StableLawSpec, z: &[f64]) -> Result<()> {
    if z.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: z.len() });
    }
    if z.iter().any(|c| !c.is_finite()) {
        return invalid("z must be finite");
    }
    Ok(())
}

/// π [cos(απ/2) A − i sin(απ/2) B] / sin(απ), i.e. G_α.
fn g_alpha(alpha: f64, a: f64, b: f64) -> Complex64 {
    let (s2, c2) = (alpha * PI / 2.0).sin_cos();
    Complex64::new(c2 * a, -s2 * b) * (PI / (alpha * PI).sin())
}

fn gamma1p(alpha: f64) -> f64 {
    libm::tgamma(alpha + 1.0)
}

/// Ξ_α(z) of the canonical form ψ_U(z) = exp(i z·⟨U⟩ − |z|^α [Ξ_α + Ω]).
pub fn xi_alpha(spec: &StableLawSpec, z: &[f64]) -> Result<Complex64> {
    check_z(spec, z)?;
    let (r, zhat) = split(z).ok_or_else(|| Error::InvalidInput("Xi_alpha needs z != 0".into()))?;
    let c = &spec.angular;
    let al = spec.alpha;
    let lnuc = spec.u_c.ln();
    match spec.regime {
        Regime::StableSub1 | Regime::Stable12 => {
            Ok(g_alpha(al, a_alpha(c, al, &zhat)?, b_alpha(c, al, &zhat)?) / gamma1p(al))
        }
        Regime::Singular1 => {
            let mean_uc = spec.truncated_mean.as_deref().ok_or_else(|| {
                Error::MissingMoment("truncated mean <U>_{u_c} is required for alpha = 1".into())
            })?;
            let a1 = a_alpha(c, 1.0, &zhat)?;
            let b1 = b_alpha(c, 1.0, &zhat)?;
            let d1 = d_alpha(c, 1.0, &zhat)?;
            let bracket = zhat.dot(mean_uc) + b1 * (1.0 - EULER_GAMMA - lnuc) - b1 * r.ln() - d1;
            Ok(Complex64::new(PI / 2.0 * a1, -bracket))
        }
        Regime::Singular2 => {
            let mbar_uc = spec.truncated_cov.as_ref().ok_or_else(|| {
                Error::MissingMoment("truncated covariance M̄_{u_c} is required for alpha = 2".into())
            })?;
            let a2 = a_alpha(c, 2.0, &zhat)?;
            let b2 = b_alpha(c, 2.0, &zhat)?;
            let d2 = d_alpha(c, 2.0, &zhat)?;
            let re = 0.5 * mbar_uc.quad_form(zhat.components())
                + 0.5 * (a2 * (1.5 - EULER_GAMMA - lnuc) - d2 - a2 * r.ln());
            Ok(Complex64::new(re, 0.25 * PI * b2))
        }
        Regime::Gauss => Ok(Complex64::new(0.5 * spec.require_cov()?.quad_form(zhat.components()), 0.0)),
    }
}

/// Directional functionals at one ẑ, shared by all radii on a ray.
#[derive(Debug, Clone, Copy)]
struct RayData {
    a: f64,
    b: f64,
    d: f64,
}

fn ray_data(spec: &StableLawSpec, zhat: &Direction) -> Result<RayData> {
    let c = &spec.angular;
    let al = spec.alpha;
    Ok(match spec.regime {
        Regime::StableSub1 | Regime::Stable12 => {
            RayData { a: a_alpha(c, al, zhat)?, b: b_alpha(c, al, zhat)?, d: 0.0 }
        }
        Regime::Singular1 => {
            RayData { a: a_alpha(c, 1.0, zhat)?, b: b_alpha(c, 1.0, zhat)?, d: d_alpha(c, 1.0, zhat)? }
        }
        Regime::Singular2 | Regime::Gauss => RayData { a: 0.0, b: 0.0, d: 0.0 },
    })
}

/// Pre-computed, direction-independent pieces (v, M, moments).
struct Globals {
    v: Vec<f64>,
    m: Matrix,
}

fn globals(spec: &StableLawSpec) -> Globals {
    Globals { v: drift_vector_v(&spec.angular), m: gaussian_matrix_m(&spec.angular) }
}

/// ln Φ(z) for the chosen renormalization.
pub fn limit_log_cf(spec: &StableLawSpec, z: &[f64], mode: LimitMode) -> Result<Complex64> {
    Ok(limit_log_cf_grid(spec, std::slice::from_ref(&z.to_vec()), mode)?[0])
}

/// [`limit_log_cf`] on a grid; angular functionals are computed once per
/// distinct direction.
pub fn limit_log_cf_grid(spec: &StableLawSpec, grid: &[Vec<f64>], mode: LimitMode) -> Result<Vec<Complex64>> {
    spec.validate()?;
    check_mode(spec, mode)?;
    let g = globals(spec);
    // The CLT limit is centered by b_N, so it carries no drift.
    let dec = match mode {
        LimitMode::Clt => Decomposition { drift: vec![0.0; spec.dim()], sigma_n: 1.0, law: LimitLaw::Stable },
        _ => asymptotic_decomposition(spec, mode_n(mode), mode_kind(mode))?,
    };
    let mut cache: HashMap<Vec<u64>, RayData> = HashMap::new();
    let mut out = Vec::with_capacity(grid.len());
    for z in grid {
        check_z(spec, z)?;
        let Some((r, zhat)) = split(z) else {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        };
        let key: Vec<u64> = zhat.components().iter().map(|x| x.to_bits()).collect();
        let rd = match cache.get(&key) {
            Some(rd) => *rd,
            None => {
                let rd = ray_data(spec, &zhat)?;
                cache.insert(key, rd);
                rd
            }
        };
        out.push(log_cf_point(spec, &g, &dec, mode, z, r, &zhat, rd)?);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn log_cf_point(
    spec: &StableLawSpec,
    g: &Globals,
    dec: &Decomposition,
    mode: LimitMode,
    z: &[f64],
    r: f64,
    zhat: &Direction,
    rd: RayData,
) -> Result<Complex64> {
    let al = spec.alpha;
    let q = spec.sign_q;
    let k = spec.dispersion;
    let i_drift = Complex64::new(0.0, dot(z, &dec.drift));
    Ok(match (mode, spec.regime) {
        (LimitMode::Clt, Regime::StableSub1 | Regime::Stable12) => -r.powf(al) * g_alpha(al, rd.a, rd.b) / gamma1p(al),
        (LimitMode::Clt, Regime::Singular1) => {
            -r * Complex64::new(PI / 2.0 * rd.a, -(zhat.dot(&g.v) * r.ln() - rd.d))
        }
        (LimitMode::Clt, Regime::Singular2) => Complex64::new(-0.5 * g.m.quad_form(z), 0.0),
        (LimitMode::Clt, Regime::Gauss) => Complex64::new(-0.5 * spec.require_cov()?.quad_form(z), 0.0),

        (LimitMode::Vlasov { .. }, Regime::Singular1) => i_drift - dec.sigma_n * PI / 2.0 * rd.a * r,
        (LimitMode::Vlasov { .. }, Regime::Stable12) => {
            i_drift - dec.sigma_n.powf(al) * r.powf(al) * g_alpha(al, rd.a, q * rd.b) / gamma1p(al)
        }
        (LimitMode::Vlasov { .. }, Regime::Singular2) => i_drift - 0.5 * dec.sigma_n.powi(2) * g.m.quad_form(z),
        (LimitMode::Vlasov { .. }, Regime::Gauss) => {
            i_drift - 0.5 * dec.sigma_n.powi(2) * spec.require_cov()?.quad_form(z)
        }

        (LimitMode::Fluctuation { .. }, Regime::StableSub1 | Regime::Stable12) => {
            -k * r.powf(al) * g_alpha(al, rd.a, q * rd.b) / gamma1p(al)
        }
        (LimitMode::Fluctuation { .. }, Regime::Singular1) => Complex64::new(-k * PI / 2.0 * rd.a * r, 0.0),
        (LimitMode::Fluctuation { .. }, Regime::Singular2) => Complex64::new(-k * g.m.quad_form(z), 0.0),
        (LimitMode::Fluctuation { .. }, Regime::Gauss) => {
            Complex64::new(-0.5 * k * spec.require_cov()?.quad_form(z), 0.0)
        }
        (LimitMode::Vlasov { .. }, Regime::StableSub1) => unreachable!("rejected by check_mode"),
    })
}

/// Decomposition mode without the particle count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionMode {
    Clt,
    Vlasov,
    Fluctuation,
}

fn mode_kind(mode: LimitMode) -> DecompositionMode {
    match mode {
        LimitMode::Clt => DecompositionMode::Clt,
        LimitMode::Vlasov { .. } => DecompositionMode::Vlasov,
        LimitMode::Fluctuation { .. } => DecompositionMode::Fluctuation,
    }
}

fn mode_n(mode: LimitMode) -> u64 {
    match mode {
        LimitMode::Clt => 1,
        LimitMode::Vlasov { n } | LimitMode::Fluctuation { n } => n,
    }
}

fn check_mode(spec: &StableLawSpec, mode: LimitMode) -> Result<()> {
    match (mode, spec.regime) {
        (LimitMode::Vlasov { .. }, Regime::StableSub1) => Err(Error::UnsupportedRegime(
            "the Vlasov limit needs alpha >= 1; for alpha < 1 no mean exists, use the fluctuation limit".into(),
        )),
        (LimitMode::Fluctuation { .. }, Regime::Singular1) if !spec.angular.is_symmetric() => {
            Err(Error::UnsupportedRegime("the alpha = 1 fluctuation limit requires a symmetric angular law".into()))
        }
        (LimitMode::Fluctuation { .. }, Regime::Stable12 | Regime::Singular2 | Regime::Gauss) => {
            match &spec.mean_u {
                Some(m) if norm(m) > 1e-12 => Err(Error::UnsupportedRegime(
                    "the fluctuation limit for alpha > 1 requires <U> = 0".into(),
                )),
                _ => Ok(()),
            }
        }
        _ => Ok(()),
    }
}

/// Drift, σ_N and law of F_res^N (CLT) or of the renormalized resultant
/// (Vlasov / fluctuation) at particle number N.
pub fn asymptotic_decomposition(spec: &StableLawSpec, n: u64, mode: DecompositionMode) -> Result<Decomposition> {
    if n < 1 {
        return invalid("N must be at least 1");
    }
    let lim_mode = match mode {
        DecompositionMode::Clt => LimitMode::Clt,
        DecompositionMode::Vlasov => LimitMode::Vlasov { n },
        DecompositionMode::Fluctuation => LimitMode::Fluctuation { n },
    };
    check_mode(spec, lim_mode)?;
    let d = spec.dim();
    let nf = n as f64;
    let al = spec.alpha;
    let k = spec.dispersion;
    let q = spec.sign_q;
    let zero = vec![0.0; d];
    let singular_law = if spec.angular.is_symmetric() { LimitLaw::Cauchy } else { LimitLaw::SemiStable };
    let need_log_n = || {
        if n < 2 {
            invalid("ln N terms need N >= 2")
        } else {
            Ok(nf.ln())
        }
    };
    Ok(match mode {
        DecompositionMode::Clt => match spec.regime {
            Regime::StableSub1 => Decomposition { drift: zero, sigma_n: nf.powf(1.0 / al), law: LimitLaw::Stable },
            Regime::Singular1 => {
                let v = drift_vector_v(&spec.angular);
                Decomposition { drift: scaled(&v, -nf * need_log_n()?), sigma_n: nf, law: singular_law }
            }
            Regime::Stable12 => Decomposition {
                drift: scaled(spec.require_mean()?, nf),
                sigma_n: nf.powf(1.0 / al),
                law: LimitLaw::Stable,
            },
            Regime::Singular2 => Decomposition {
                drift: spec.mean_u.as_deref().map_or(zero, |m| scaled(m, nf)),
                sigma_n: (nf * need_log_n()?).sqrt(),
                law: LimitLaw::GaussianLog,
            },
            Regime::Gauss => Decomposition {
                drift: scaled(spec.require_mean()?, nf),
                sigma_n: nf.sqrt(),
                law: LimitLaw::Gaussian,
            },
        },
        DecompositionMode::Vlasov => match spec.regime {
            Regime::StableSub1 => unreachable!("rejected by check_mode"),
            Regime::Singular1 => {
                let v = drift_vector_v(&spec.angular);
                Decomposition { drift: scaled(&v, -q * k), sigma_n: nf * solve_singular(k, n)?, law: singular_law }
            }
            Regime::Stable12 => Decomposition {
                drift: scaled(spec.require_mean()?, q * k),
                sigma_n: k * nf.powf((1.0 - al) / al),
                law: LimitLaw::Stable,
            },
            Regime::Singular2 => Decomposition {
                drift: scaled(spec.require_mean()?, q * k),
                sigma_n: k * (need_log_n()? / nf).sqrt(),
                law: LimitLaw::GaussianLog,
            },
            Regime::Gauss => Decomposition {
                drift: scaled(spec.require_mean()?, q * k),
                sigma_n: k / nf.sqrt(),
                law: LimitLaw::Gaussian,
            },
        },
        DecompositionMode::Fluctuation => match spec.regime {
            Regime::StableSub1 | Regime::Stable12 => {
                Decomposition { drift: zero, sigma_n: k.powf(1.0 / al), law: LimitLaw::Stable }
            }
            Regime::Singular1 => Decomposition { drift: zero, sigma_n: k, law: LimitLaw::Cauchy },
            Regime::Singular2 => Decomposition { drift: zero, sigma_n: k.sqrt(), law: LimitLaw::GaussianLog },
            Regime::Gauss => Decomposition { drift: zero, sigma_n: k.sqrt(), law: LimitLaw::Gaussian },
        },
    })
}

/// Φ(z) = exp(−λ A_α |z|^α / Γ(1+α) · [1 − i β_α tan(απ/2)]).
pub fn levy_khintchine_cf(lambda: f64, alpha: f64, c: &AngularFunction, z: &[f64]) -> Result<CfValue> {
    if !(lambda > 0.0) {
        return invalid("lambda must be positive");
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return invalid(format!("the Lévy–Khintchine form needs alpha in (0, 2] (got {alpha})"));
    }
    if (alpha - 1.0).abs() < INTEGER_TOL {
        return Err(Error::UnsupportedRegime(
            "alpha = 1 has no tan form; use limit_log_cf with the singular regime".into(),
        ));
    }
    if z.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: z.len() });
    }
    let Some((r, zhat)) = split(z) else {
        return Ok(CfValue { value: Complex64::new(1.0, 0.0) });
    };
    let a = a_alpha(c, alpha, &zhat)?;
    let b = b_alpha(c, alpha, &zhat)?;
    Ok(CfValue { value: lk_from_functionals(lambda, alpha, a, b, r) })
}

fn lk_from_functionals(lambda: f64, alpha: f64, a: f64, b: f64, r: f64) -> Complex64 {
    let beta = if a > 0.0 { b / a } else { 0.0 };
    let tan = if (alpha - 2.0).abs() < INTEGER_TOL { 0.0 } else { (alpha * PI / 2.0).tan() };
    let expo = Complex64::new(1.0, -beta * tan) * (-lambda * a * r.powf(alpha) / gamma1p(alpha));
    expo.exp()
}

/// λ₁a₁^α + λ₂a₂^α.
pub fn stability_combine(lambda1: f64, a1: f64, lambda2: f64, a2: f64, alpha: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return invalid("stability_combine needs positive lambdas");
    }
    Ok(lambda1 * a1.abs().powf(alpha) + lambda2 * a2.abs().powf(alpha))
}

/// One-dimensional parameters (A_k, β_k) of the k-th marginal (0-based axis).
pub fn marginal_params(spec: &StableLawSpec, k: usize) -> Result<(f64, f64)> {
    let ek = Direction::axis(spec.dim(), k)?;
    let a = a_alpha(&spec.angular, spec.alpha, &ek)?;
    let b = b_alpha(&spec.angular, spec.alpha, &ek)?;
    Ok((a, if a > 0.0 { b / a } else { 0.0 }))
}

/// CF of the k-th component (0-based), i.e. the Lévy–Khintchine CF at z_k ê_k.
pub fn marginal_cf(spec: &StableLawSpec, k: usize, z_k: f64) -> Result<CfValue> {
    if k >= spec.dim() {
        return invalid(format!("axis {k} out of range for dimension {}", spec.dim()));
    }
    let mut z = vec![0.0; spec.dim()];
    z[k] = z_k;
    levy_khintchine_cf(spec.dispersion, spec.alpha, &spec.angular, &z)
}
