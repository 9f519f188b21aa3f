//! Renormalization schemes: the CLT constants a_N, b_N, the a_N conditions of
//! the fluctuation / singular / Vlasov limits, and their scale and physical
//! (κ_N, L_N) realizations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{norm, scaled};
use crate::tail::{EULER_GAMMA, INTEGER_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Clt,
    FluctuationAn,
    SingularAn,
    VlasovAn,
    Scale,
    PhysicalFixedSize,
    PhysicalFixedForce,
    FluctuationHighAlpha,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 8] = [
        SchemeKind::Clt,
        SchemeKind::FluctuationAn,
        SchemeKind::SingularAn,
        SchemeKind::VlasovAn,
        SchemeKind::Scale,
        SchemeKind::PhysicalFixedSize,
        SchemeKind::PhysicalFixedForce,
        SchemeKind::FluctuationHighAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Clt => "clt",
            SchemeKind::FluctuationAn => "fluctuation_an",
            SchemeKind::SingularAn => "singular_an",
            SchemeKind::VlasovAn => "vlasov_an",
            SchemeKind::Scale => "scale",
            SchemeKind::PhysicalFixedSize => "physical_fixed_size",
            SchemeKind::PhysicalFixedForce => "physical_fixed_force",
            SchemeKind::FluctuationHighAlpha => "fluctuation_high_alpha",
        }
    }

    /// Whether the scheme is defined for this α.
    pub fn admits(self, alpha: f64) -> bool {
        let one = (alpha - 1.0).abs() < INTEGER_TOL;
        match self {
            SchemeKind::FluctuationAn => alpha < 1.0 && !one,
            SchemeKind::SingularAn => one,
            SchemeKind::VlasovAn => alpha > 1.0 && !one,
            SchemeKind::FluctuationHighAlpha => alpha >= 1.0 || one,
            _ => true,
        }
    }

    pub fn admissible_for(alpha: f64) -> Vec<SchemeKind> {
        Self::ALL.into_iter().filter(|k| k.admits(alpha)).collect()
    }
}

/// (d, ν, δ) of the spatial density and force law; α = (d+ν)/δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub d: usize,
    pub nu: f64,
    pub delta: f64,
}

impl Geometry {
    pub fn new(d: usize, nu: f64, delta: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return invalid(format!("dimension must be 1, 2 or 3 (got {d})"));
        }
        if !(nu > -(d as f64)) {
            return invalid(format!("nu must exceed -d = {} for the density to be integrable", -(d as f64)));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return invalid("delta must be non-negative");
        }
        Ok(Self { d, nu, delta })
    }

    /// (d+ν)/δ; infinite for δ = 0.
    pub fn alpha(&self) -> f64 {
        if self.delta == 0.0 {
            f64::INFINITY
        } else {
            (self.d as f64 + self.nu) / self.delta
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormScheme {
    pub kind: SchemeKind,
    pub alpha: f64,
    pub k: f64,
    pub geometry: Option<Geometry>,
}

impl RenormScheme {
    pub fn new(kind: SchemeKind, alpha: f64, k: f64) -> Result<Self> {
        let s = Self { kind, alpha, k, geometry: None };
        s.validate()?;
        Ok(s)
    }

    /// Scheme tied to a physical geometry; α is derived from it.
    pub fn physical(kind: SchemeKind, k: f64, geometry: Geometry) -> Result<Self> {
        let s = Self { kind, alpha: geometry.alpha(), k, geometry: Some(geometry) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return invalid("K must be positive");
        }
        if !(self.alpha > 0.0) {
            return invalid("alpha must be positive");
        }
        if let Some(g) = self.geometry {
            let a = g.alpha();
            let consistent = if a.is_infinite() { self.alpha.is_infinite() } else { (a - self.alpha).abs() <= 1e-12 };
            if !consistent {
                return invalid(format!("alpha = {} differs from (d+nu)/delta = {a}", self.alpha));
            }
        }
        if !self.kind.admits(self.alpha) {
            let names: Vec<&str> = SchemeKind::admissible_for(self.alpha).iter().map(|k| k.name()).collect();
            return invalid(format!(
                "scheme {} is not admissible for alpha = {}; admissible: {}",
                self.kind.name(),
                self.alpha,
                names.join(", ")
            ));
        }
        Ok(())
    }

    fn require_geometry(&self) -> Result<Geometry> {
        self.geometry
            .ok_or_else(|| Error::InvalidInput(format!("scheme {} needs (d, nu, delta)", self.kind.name())))
    }
}

/// Largest c for which −a^p ln a = c has a root: 1/(p e).
pub fn small_branch_max(p: f64) -> f64 {
    1.0 / (p * std::f64::consts::E)
}

/// Root of −a^p ln a = c on the small branch a ∈ (0, e^{−1/p}]: bisection in
/// ln a, then Newton polish in a.
pub fn solve_small_branch(c: f64, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return invalid("exponent p must be positive");
    }
    let cmax = small_branch_max(p);
    if !(c > 0.0) || c > cmax * (1.0 + 1e-15) {
        return Err(Error::NoRoot(format!("-a^{p} ln a = {c} has no root on (0, e^(-1/p)] (max {cmax})")));
    }
    let top = -1.0 / p;
    if c >= cmax {
        return Ok(top.exp());
    }
    let f = |t: f64| -(p * t).exp() * t;
    // f is increasing in t on (−∞, top].
    let mut hi = top;
    let mut lo = top - 1.0;
    while f(lo) > c {
        lo = 2.0 * lo;
        if lo < -1e6 {
            return Err(Error::NoRoot(format!("c = {c} underflows the small branch")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (alo, ahi) = (lo.exp(), hi.exp());
    let mut a = (0.5 * (lo + hi)).exp();
    let g = |a: f64| -a.powf(p) * a.ln() - c;
    for _ in 0..2 {
        let dg = -a.powf(p - 1.0) * (p * a.ln() + 1.0);
        if dg == 0.0 {
            break;
        }
        let next = a - g(a) / dg;
        if next > 0.0 && next >= alo * (1.0 - 1e-12) && next <= ahi * (1.0 + 1e-12) && g(next).abs() <= g(a).abs() {
            a = next;
        }
    }
    Ok(a)
}

/// The root h(c) of −a ln a = c, c ≤ 1/e, on the branch a → 0 as c → 0.
pub fn solve_neg_a_log_a(c: f64) -> Result<f64> {
    solve_small_branch(c, 1.0)
}

/// Minimum particle number N ≥ (2/ln 2)·K for the singular a_N condition.
pub fn singular_min_n(k: f64) -> f64 {
    2.0 / std::f64::consts::LN_2 * k
}

/// |a_N| with −N|a_N| ln|a_N| = K, for N ≥ (2/ln 2)K.
pub fn solve_singular(k: f64, n: u64) -> Result<f64> {
    if !(k > 0.0) {
        return invalid("K must be positive");
    }
    let nf = n as f64;
    if nf < singular_min_n(k) {
        return invalid(format!("the singular scheme needs N >= (2/ln 2)K = {:.6} (got N = {n})", singular_min_n(k)));
    }
    solve_neg_a_log_a(k / nf)
}

/// Moments entering the CLT centering b_N.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CltMoments {
    pub dim: usize,
    /// ⟨U⟩ (so that ⟨F_res⟩ = N⟨U⟩); required for α > 1.
    pub mean_u: Option<Vec<f64>>,
    /// ⟨U⟩_{u_c}; required for α = 1.
    pub mean_u_uc: Option<Vec<f64>>,
    /// v = −∫C û dS; required for α = 1.
    pub v: Option<Vec<f64>>,
    /// u_c; required for α = 1.
    pub u_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltRenorm {
    pub a_n: f64,
    pub b_n: Vec<f64>,
}

/// a_N, b_N of the generalized central limit theorem.
pub fn clt_renorm(alpha: f64, n: u64, m: &CltMoments) -> Result<CltRenorm> {
    if n < 1 {
        return invalid("N must be at least 1");
    }
    if !(1..=3).contains(&m.dim) {
        return invalid("moment dimension must be 1, 2 or 3");
    }
    let nf = n as f64;
    let one = (alpha - 1.0).abs() < INTEGER_TOL;
    let two = (alpha - 2.0).abs() < INTEGER_TOL;
    let need = |v: &Option<Vec<f64>>, what: &str| -> Result<Vec<f64>> {
        let v = v.clone().ok_or_else(|| Error::MissingMoment(format!("{what} is required for alpha = {alpha}")))?;
        if v.len() != m.dim {
            return Err(Error::DimensionMismatch { expected: m.dim, got: v.len() });
        }
        Ok(v)
    };
    if (one || two) && n < 2 {
        return invalid("alpha in {1, 2} needs N >= 2 (ln N must be positive)");
    }
    if !(alpha > 0.0) {
        return invalid("alpha must be positive");
    }
    Ok(if one {
        let mu = need(&m.mean_u_uc, "<U>_{u_c}")?;
        let v = need(&m.v, "v")?;
        let uc = m.u_c.ok_or_else(|| Error::MissingMoment("u_c is required for alpha = 1".into()))?;
        let coef = 1.0 - EULER_GAMMA - uc.ln() + nf.ln();
        CltRenorm { a_n: 1.0 / nf, b_n: mu.iter().zip(&v).map(|(u, v)| -u + v * coef).collect() }
    } else if alpha < 1.0 {
        CltRenorm { a_n: nf.powf(-1.0 / alpha), b_n: vec![0.0; m.dim] }
    } else {
        let a_n = if two {
            1.0 / (nf * nf.ln()).sqrt()
        } else if alpha < 2.0 {
            nf.powf(-1.0 / alpha)
        } else {
            1.0 / nf.sqrt()
        };
        let mean = need(&m.mean_u, "<U>")?;
        CltRenorm { a_n, b_n: scaled(&mean, -nf * a_n) }
    })
}

/// Which a_N condition applies to α outside the CLT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Limit {
    Fluctuation,
    Singular,
    Vlasov,
}

fn limit_for(alpha: f64) -> Limit {
    if (alpha - 1.0).abs() < INTEGER_TOL {
        Limit::Singular
    } else if alpha < 1.0 {
        Limit::Fluctuation
    } else {
        Limit::Vlasov
    }
}

/// |a_N| from N|a_N|^α = K, −N|a_N|ln|a_N| = K or N|a_N| = K.
fn table2_a(alpha: f64, k: f64, n: u64) -> Result<f64> {
    let nf = n as f64;
    match limit_for(alpha) {
        Limit::Fluctuation => Ok((k / nf).powf(1.0 / alpha)),
        Limit::Singular => solve_singular(k, n),
        Limit::Vlasov => Ok(k / nf),
    }
}

/// |a_N| with N|a_N|^α = K (1 ≤ α < 2), −N|a_N|² ln|a_N| = K (α = 2),
/// N|a_N|² = K (α > 2).
fn table5_a(alpha: f64, k: f64, n: u64) -> Result<f64> {
    let nf = n as f64;
    if (alpha - 2.0).abs() < INTEGER_TOL {
        solve_small_branch(k / nf, 2.0)
    } else if alpha < 2.0 {
        Ok((k / nf).powf(1.0 / alpha))
    } else {
        Ok((k / nf).sqrt())
    }
}

/// |a_N| for any scheme at particle number N.
pub fn a_n_scheme(scheme: &RenormScheme, n: u64) -> Result<f64> {
    scheme.validate()?;
    if n < 1 {
        return invalid("N must be at least 1");
    }
    let al = scheme.alpha;
    match scheme.kind {
        SchemeKind::Clt => {
            let m = CltMoments { dim: 1, mean_u: Some(vec![0.0]), ..Default::default() };
            if (al - 1.0).abs() < INTEGER_TOL {
                Ok(1.0 / n as f64)
            } else {
                Ok(clt_renorm(al, n, &m)?.a_n)
            }
        }
        SchemeKind::FluctuationHighAlpha => table5_a(al, scheme.k, n),
        _ => table2_a(al, scheme.k, n),
    }
}

/// Which unit is held fixed in a scale renormalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleFix {
    /// T_N = 1; solve for L_N.
    Time,
    /// L_N = 1; solve for T_N.
    Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRenorm {
    pub t_n: f64,
    pub l_n: f64,
}

/// (T_N, L_N) with T_N²/L_N equal to the Table-2 |a_N| (|κ| = 1 units).
pub fn scale_renorm(scheme: &RenormScheme, n: u64, fix: ScaleFix) -> Result<ScaleRenorm> {
    if scheme.kind != SchemeKind::Scale {
        return invalid("scale_renorm needs a scale scheme");
    }
    let x = a_n_scheme(scheme, n)?;
    Ok(match fix {
        ScaleFix::Time => ScaleRenorm { t_n: 1.0, l_n: 1.0 / x },
        ScaleFix::Length => ScaleRenorm { t_n: x.sqrt(), l_n: 1.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalRenorm {
    pub kappa_n: f64,
    pub l_n: f64,
}

fn realize(case: PhysicalCase, a: f64, delta: Option<f64>) -> Result<PhysicalRenorm> {
    match case {
        PhysicalCase::FixedSize => Ok(PhysicalRenorm { kappa_n: a, l_n: 1.0 }),
        PhysicalCase::FixedForce => {
            let delta = delta.ok_or_else(|| Error::InvalidInput("fixed-force scheme needs delta".into()))?;
            if !(delta > 0.0) {
                return invalid("with a fixed force constant the size cannot absorb delta = 0");
            }
            let l = a.powf(-1.0 / delta);
            if !(l > 1.0) {
                return invalid(format!("fixed-force solution needs L_N > 1 (got {l})"));
            }
            Ok(PhysicalRenorm { kappa_n: 1.0, l_n: l })
        }
    }
}

/// (|κ_N|, L_N) realizing the Table-2 condition with a_N = κ_N / L_N^δ.
pub fn physical_renorm(scheme: &RenormScheme, n: u64) -> Result<PhysicalRenorm> {
    let case = match scheme.kind {
        SchemeKind::PhysicalFixedSize => PhysicalCase::FixedSize,
        SchemeKind::PhysicalFixedForce => PhysicalCase::FixedForce,
        _ => return invalid("physical_renorm needs a physical scheme"),
    };
    let a = a_n_scheme(scheme, n)?;
    realize(case, a, scheme.geometry.map(|g| g.delta))
}

/// Case (i) L_N = 1 or case (ii) |κ_N| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhysicalCase {
    FixedSize,
    FixedForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighAlphaRenorm {
    pub condition: String,
    pub kappa_n: f64,
    pub l_n: f64,
}

/// Zero-mean fluctuation limit for α ≥ 1.
pub fn fluctuation_high_alpha(
    scheme: &RenormScheme,
    n: u64,
    case: PhysicalCase,
    declared_mean: Option<&[f64]>,
) -> Result<HighAlphaRenorm> {
    if scheme.kind != SchemeKind::FluctuationHighAlpha {
        return invalid("fluctuation_high_alpha needs a fluctuation_high_alpha scheme");
    }
    if let Some(m) = declared_mean {
        if norm(m) > 1e-12 {
            return Err(Error::UnsupportedRegime("the fluctuation limit for alpha >= 1 requires <U> = 0".into()));
        }
    }
    let al = scheme.alpha;
    let condition = if (al - 2.0).abs() < INTEGER_TOL {
        "-N |a_N|^2 ln|a_N| = K"
    } else if al < 2.0 {
        "N |a_N|^alpha = K"
    } else {
        "N |a_N|^2 = K"
    };
    let a = a_n_scheme(scheme, n)?;
    let delta = match case {
        PhysicalCase::FixedSize => None,
        PhysicalCase::FixedForce => Some(scheme.require_geometry()?.delta),
    };
    let r = realize(case, a, delta)?;
    Ok(HighAlphaRenorm { condition: condition.to_string(), kappa_n: r.kappa_n, l_n: r.l_n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_branch_top() {
        assert!((solve_neg_a_log_a(1.0 / std::f64::consts::E).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(solve_neg_a_log_a(0.5).is_err());
        let a = solve_small_branch(0.01, 2.0).unwrap();
        assert!((-a * a * a.ln() - 0.01).abs() < 1e-15);
        assert!(a <= (-0.5f64).exp());
    }

    #[test]
    fn singular_bound() {
        assert!(solve_singular(1.0, 2).is_err());
        assert!(solve_singular(1.0, 3).is_ok());
        let s = RenormScheme::new(SchemeKind::SingularAn, 1.0, 10.0).unwrap();
        assert!(a_n_scheme(&s, 28).is_err());
    }

    #[test]
    fn table_two_examples() {
        let v = RenormScheme::new(SchemeKind::VlasovAn, 1.5, 1.0).unwrap();
        assert_eq!(a_n_scheme(&v, 1000).unwrap(), 0.001);
        let f = RenormScheme::new(SchemeKind::FluctuationAn, 0.5, 1.0).unwrap();
        assert!((a_n_scheme(&f, 100).unwrap() - 1e-4).abs() < 1e-19);
    }

    #[test]
    fn admissibility() {
        assert!(RenormScheme::new(SchemeKind::VlasovAn, 0.5, 1.0).is_err());
        assert!(RenormScheme::new(SchemeKind::SingularAn, 1.5, 1.0).is_err());
        assert!(RenormScheme::new(SchemeKind::FluctuationHighAlpha, 0.7, 1.0).is_err());
        let err = RenormScheme::new(SchemeKind::FluctuationAn, 1.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("vlasov_an"));
        assert!(RenormScheme::new(SchemeKind::Clt, 0.3, 0.0).is_err());
    }

    #[test]
    fn clt_examples() {
        let m = CltMoments { dim: 3, mean_u: Some(vec![0.0; 3]), ..Default::default() };
        let r = clt_renorm(0.5, 16, &m).unwrap();
        assert_eq!(r.a_n, 1.0 / 256.0);
        assert_eq!(r.b_n, vec![0.0; 3]);
        let r = clt_renorm(3.0, 100, &m).unwrap();
        assert!((r.a_n - 0.1).abs() < 1e-16);
        assert!(clt_renorm(2.0, 1, &m).is_err());
        assert!(matches!(clt_renorm(1.0, 10, &m), Err(Error::MissingMoment(_))));
    }

    #[test]
    fn scale_examples() {
        let v = RenormScheme::new(SchemeKind::Scale, 2.0, 1.0).unwrap();
        let r = scale_renorm(&v, 100, ScaleFix::Time).unwrap();
        assert!((r.l_n - 100.0).abs() < 1e-12);
        let f = RenormScheme::new(SchemeKind::Scale, 0.5, 1.0).unwrap();
        let r = scale_renorm(&f, 16, ScaleFix::Length).unwrap();
        assert!((r.t_n - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn high_alpha_rejects_mean() {
        let s = RenormScheme::new(SchemeKind::FluctuationHighAlpha, 3.0, 1.0).unwrap();
        assert!(fluctuation_high_alpha(&s, 100, PhysicalCase::FixedSize, Some(&[0.1])).is_err());
        let r = fluctuation_high_alpha(&s, 100, PhysicalCase::FixedSize, Some(&[0.0])).unwrap();
        assert!((r.kappa_n - 0.1).abs() < 1e-16);
        assert!(fluctuation_high_alpha(&s, 100, PhysicalCase::FixedForce, None).is_err());
    }
}
