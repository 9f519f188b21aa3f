//! Subcommand drivers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use stableforce::angular::{drift_vector_v, AngularFunction};
use stableforce::charfn::{asymptotic_decomposition, limit_log_cf_grid, DecompositionMode, LimitMode, Regime, StableLawSpec};
use stableforce::mc::{empirical_cf, resultant_forces, stream_rng, truncated_moments, MomentRequest};
use stableforce::renorm::{
    a_n_scheme, clt_renorm, fluctuation_high_alpha, physical_renorm, CltMoments, SchemeKind,
};
use stableforce::tail::{j_alpha, j_alpha_oracle, TailIntegralParams};

use crate::config::Resolved;
use crate::grid::{parse_grid, DEFAULT_GRID};
use crate::report::{write_csv, write_json, z_header};
use crate::CliError;

/// Stream reserved for moment estimation.
const MOMENT_STREAM: u64 = u64::MAX - 1;
/// Floor of the ECF tolerance.
pub const MIN_TOLERANCE: f64 = 0.03;
/// Largest acceptable relative error of the `oracle` comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

fn out_dir(res: &Resolved) -> Result<PathBuf, CliError> {
    let dir = res.config.run.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("resolved_config.toml"), res.config.to_toml())?;
    Ok(dir)
}

fn grid_of(res: &Resolved) -> Result<Vec<Vec<f64>>, CliError> {
    parse_grid(res.config.run.grid.as_deref().unwrap_or(DEFAULT_GRID), res.sim.density.dim)
}

/// The limit mode a scheme converges to.
pub fn limit_mode(res: &Resolved) -> LimitMode {
    let n = res.sim.n_particles;
    match res.sim.scheme.kind {
        SchemeKind::Clt => LimitMode::Clt,
        SchemeKind::FluctuationAn | SchemeKind::FluctuationHighAlpha => LimitMode::Fluctuation { n },
        SchemeKind::SingularAn | SchemeKind::VlasovAn => LimitMode::Vlasov { n },
        SchemeKind::Scale | SchemeKind::PhysicalFixedSize | SchemeKind::PhysicalFixedForce => {
            if res.alpha < 1.0 {
                LimitMode::Fluctuation { n }
            } else {
                LimitMode::Vlasov { n }
            }
        }
    }
}

/// C(û) of the force density: g/δ, or (δ−1)^α g/δ for the damped law.
pub fn tail_angular(res: &Resolved) -> Result<AngularFunction, CliError> {
    let law = &res.sim.law;
    let g = &res.sim.density.g;
    if law.delta == 0.0 {
        return Ok(g.clone());
    }
    let mut factor = 1.0 / law.delta;
    if law.damping.is_some() {
        factor *= (law.delta - 1.0).powf(res.alpha);
    }
    Ok(g.scaled(factor)?)
}

/// Everything needed to compare the simulated ensemble with its limit.
pub struct LimitSetup {
    pub spec: StableLawSpec,
    pub mode: LimitMode,
    /// CLT centering added to a_N Σ U.
    pub b_n: Option<Vec<f64>>,
}

pub fn limit_setup(res: &Resolved, alpha_shift: f64, moment_samples: usize) -> Result<LimitSetup, CliError> {
    let sim = &res.sim;
    let mode = limit_mode(res);
    let c = tail_angular(res)?;
    let u_c = if sim.law.delta == 0.0 { 1.0 } else { sim.density.r_c.powf(-sim.law.delta) };
    let alpha = res.alpha;
    let regime = res.regime;
    let clt = matches!(mode, LimitMode::Clt);
    let fluct = matches!(mode, LimitMode::Fluctuation { .. });

    let want_mean = alpha > 1.0 && !fluct;
    let want_cov = regime == Regime::Gauss;
    let want_trunc = clt && regime == Regime::Singular1;
    let moments = if want_mean || want_cov || want_trunc {
        let mut rng = stream_rng(sim.seed, MOMENT_STREAM);
        let req = MomentRequest { mean: want_mean, covariance: want_cov };
        Some(truncated_moments(&sim.density, &sim.law, u_c, moment_samples, req, &mut rng)?)
    } else {
        None
    };

    let q = if clt { 1.0 } else { sim.law.sign_q() };
    let mut spec = StableLawSpec::new(alpha + alpha_shift, c.clone(), sim.scheme.k)?.with_sign_q(q)?.with_u_c(u_c)?;
    if let Some(m) = &moments {
        if want_mean {
            spec = spec.with_mean(m.mean_u.clone().expect("requested"))?;
        }
        if want_cov {
            spec = spec.with_cov(m.mbar.clone().expect("requested"))?;
        }
        if want_trunc {
            spec = spec.with_truncated_mean(m.mean_u_uc.clone())?;
        }
    }

    let b_n = if clt {
        let m = moments.as_ref();
        let cm = CltMoments {
            dim: sim.density.dim,
            mean_u: m.and_then(|m| m.mean_u.clone()),
            mean_u_uc: m.map(|m| m.mean_u_uc.clone()),
            v: Some(drift_vector_v(&c)),
            u_c: Some(u_c),
        };
        Some(clt_renorm(alpha, sim.n_particles, &cm)?.b_n)
    } else {
        None
    };
    Ok(LimitSetup { spec, mode, b_n })
}

fn mode_name(mode: LimitMode) -> &'static str {
    match mode {
        LimitMode::Clt => "clt",
        LimitMode::Vlasov { .. } => "vlasov",
        LimitMode::Fluctuation { .. } => "fluctuation",
    }
}

/// Renormalized resultant forces; CLT runs are centred by b_N and use the
/// unsigned sum.
fn ensemble(res: &Resolved, b_n: Option<&[f64]>) -> Result<Vec<Vec<f64>>, CliError> {
    let mut forces = resultant_forces(&res.sim)?;
    if let Some(b) = b_n {
        let q = res.sim.law.sign_q();
        for f in &mut forces {
            for (x, b) in f.iter_mut().zip(b) {
                *x = q * *x + b;
            }
        }
    }
    Ok(forces)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub alpha: f64,
    pub regime: String,
    pub n: u64,
    pub replicas: u64,
    pub a_n: f64,
    pub config_hash: String,
}

pub fn simulate(res: &Resolved) -> Result<SimulateSummary, CliError> {
    let dir = out_dir(res)?;
    let forces = resultant_forces(&res.sim)?;
    let d = res.sim.density.dim;
    let mut header = vec!["replica".to_string()];
    header.extend((1..=d).map(|k| format!("f{k}")));
    let rows: Vec<Vec<f64>> = forces
        .iter()
        .enumerate()
        .map(|(i, f)| std::iter::once(i as f64).chain(f.iter().copied()).collect())
        .collect();
    write_csv(&dir.join("forces.csv"), &header, &rows)?;

    let m = forces.len() as f64;
    let mut stats = vec![];
    for k in 0..d {
        let mut col: Vec<f64> = forces.iter().map(|f| f[k]).collect();
        let mean = col.iter().sum::<f64>() / m;
        let sd = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        col.sort_by(|a, b| a.total_cmp(b));
        let median = if col.len() % 2 == 1 {
            col[col.len() / 2]
        } else {
            0.5 * (col[col.len() / 2 - 1] + col[col.len() / 2])
        };
        stats.push(vec![(k + 1) as f64, mean, sd, median, col[0], col[col.len() - 1]]);
    }
    let header: Vec<String> = ["component", "mean", "std", "median", "min", "max"].map(String::from).to_vec();
    write_csv(&dir.join("summary.csv"), &header, &stats)?;
    let summary = SimulateSummary {
        alpha: res.alpha,
        regime: res.regime.label().to_string(),
        n: res.sim.n_particles,
        replicas: res.sim.replicas,
        a_n: res.sim.a_n()?,
        config_hash: res.config.hash(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub regime: String,
    pub mode: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub replicas: u64,
    pub alpha: f64,
    pub sup_diff: f64,
    pub max_stderr: f64,
    pub threshold: f64,
    pub pass: bool,
    pub config_hash: String,
}

pub fn verify(res: &Resolved) -> Result<Verdict, CliError> {
    let dir = out_dir(res)?;
    let grid = grid_of(res)?;
    if grid.is_empty() {
        return Err(CliError::Config("verify needs a non-empty z-grid".into()));
    }
    let v = &res.config.verify;
    let setup = limit_setup(res, v.alpha_shift, v.moment_samples)?;
    let forces = ensemble(res, setup.b_n.as_deref())?;
    let ecf = empirical_cf(&forces, &grid)?;
    let ln_phi = limit_log_cf_grid(&setup.spec, &grid, setup.mode)?;

    let d = res.sim.density.dim;
    let mut header = z_header(d);
    header.extend(["re_ecf", "im_ecf", "re_phi", "im_phi", "abs_diff", "stderr"].map(String::from));
    let mut rows = vec![];
    let mut sup = 0.0f64;
    for (i, z) in grid.iter().enumerate() {
        let phi = ln_phi[i].exp();
        let e = ecf.values[i];
        let diff = (e - phi).norm();
        sup = sup.max(diff);
        let mut r = z.clone();
        r.extend([e.re, e.im, phi.re, phi.im, diff, ecf.stderr[i]]);
        rows.push(r);
    }
    write_csv(&dir.join("comparison.csv"), &header, &rows)?;
    let max_se = ecf.stderr.iter().copied().fold(0.0, f64::max);
    let threshold = v.tolerance.unwrap_or(MIN_TOLERANCE.max(3.0 * max_se));
    let verdict = Verdict {
        regime: res.regime.label().to_string(),
        mode: mode_name(setup.mode).to_string(),
        n: res.sim.n_particles,
        replicas: res.sim.replicas,
        alpha: res.alpha,
        sup_diff: sup,
        max_stderr: max_se,
        threshold,
        pass: sup <= threshold,
        config_hash: res.config.hash(),
    };
    write_json(&dir.join("verdict.json"), &verdict)?;
    Ok(verdict)
}

/// ln Φ on the grid; returns the number of rows written.
pub fn limits(res: &Resolved) -> Result<usize, CliError> {
    let dir = out_dir(res)?;
    let grid = grid_of(res)?;
    let d = res.sim.density.dim;
    let mut header = z_header(d);
    header.extend(["re_ln_phi", "im_ln_phi"].map(String::from));
    let rows: Vec<Vec<f64>> = if grid.is_empty() {
        vec![]
    } else {
        let setup = limit_setup(res, 0.0, res.config.verify.moment_samples)?;
        let ln_phi = limit_log_cf_grid(&setup.spec, &grid, setup.mode)?;
        grid.iter()
            .zip(&ln_phi)
            .map(|(z, l)| {
                let mut r = z.clone();
                r.extend([l.re, l.im]);
                r
            })
            .collect()
    };
    write_csv(&dir.join("limits.csv"), &header, &rows)?;
    Ok(rows.len())
}

pub const DEFAULT_TABLE_NS: [u64; 8] = [10, 100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000, 100_000_000];

/// (N, a_N, κ_N, L_N, σ_N); infeasible N yield NaN entries.
pub fn renorm_table(res: &Resolved, ns: &[u64]) -> Result<Vec<Vec<f64>>, CliError> {
    let dir = out_dir(res)?;
    let mode = limit_mode(res);
    let c = tail_angular(res)?;
    let dim = res.sim.density.dim;
    let mut spec = StableLawSpec::new(res.alpha, c, res.sim.scheme.k)?.with_sign_q(res.sim.law.sign_q())?;
    // σ_N does not depend on the mean; a zero placeholder satisfies the drift terms.
    if res.alpha > 1.0 {
        spec = spec.with_mean(vec![0.0; dim])?;
    }
    let dmode = match mode {
        LimitMode::Clt => DecompositionMode::Clt,
        LimitMode::Vlasov { .. } => DecompositionMode::Vlasov,
        LimitMode::Fluctuation { .. } => DecompositionMode::Fluctuation,
    };
    let scheme = &res.sim.scheme;
    let mut rows = vec![];
    for &n in ns {
        let row = (|| -> Result<Vec<f64>, CliError> {
            let a = a_n_scheme(scheme, n)?;
            let (kappa, l) = match scheme.kind {
                SchemeKind::PhysicalFixedSize | SchemeKind::PhysicalFixedForce => {
                    let p = physical_renorm(scheme, n)?;
                    (p.kappa_n, p.l_n)
                }
                SchemeKind::FluctuationHighAlpha => {
                    let p = fluctuation_high_alpha(scheme, n, res.config.scheme.case, None)?;
                    (p.kappa_n, p.l_n)
                }
                _ => (a, 1.0),
            };
            let sigma = asymptotic_decomposition(&spec, n, dmode)?.sigma_n;
            Ok(vec![n as f64, a, kappa, l, sigma])
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => {
                log::warn!("N = {n}: {e}");
                rows.push(vec![n as f64, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    let header: Vec<String> = ["N", "a_n", "kappa_n", "l_n", "sigma_n"].map(String::from).to_vec();
    write_csv(&dir.join("renorm_table.csv"), &header, &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub alpha: f64,
    pub cutoff: f64,
    pub points: usize,
    pub max_rel_err: f64,
    pub pass: bool,
}

/// Closed-form J_α against direct quadrature on `points` z-values in
/// [−z_max, z_max].
pub fn oracle(alpha: f64, cutoff: f64, z_max: f64, points: usize, out: &Path) -> Result<OracleReport, CliError> {
    if points < 1 || !(z_max > 0.0) {
        return Err(CliError::Config("oracle needs points >= 1 and z_max > 0".into()));
    }
    fs::create_dir_all(out)?;
    let p = TailIntegralParams::new(alpha, cutoff)?;
    let mut rows = vec![];
    let mut worst = 0.0f64;
    for i in 0..points {
        let z = if points == 1 { z_max } else { -z_max + 2.0 * z_max * i as f64 / (points - 1) as f64 };
        let c = j_alpha(&p, z)?;
        let o = j_alpha_oracle(&p, z)?;
        let rel = (c - o).norm() / o.norm();
        worst = worst.max(rel);
        rows.push(vec![z, c.re, c.im, o.re, o.im, rel]);
    }
    let header: Vec<String> =
        ["z", "re_closed", "im_closed", "re_oracle", "im_oracle", "rel_err"].map(String::from).to_vec();
    write_csv(&out.join("oracle.csv"), &header, &rows)?;
    let report = OracleReport { alpha, cutoff, points, max_rel_err: worst, pass: worst <= ORACLE_TOLERANCE };
    write_json(&out.join("oracle.json"), &report)?;
    Ok(report)
}
