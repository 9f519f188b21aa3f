//! Angular densities on the unit sphere S_d (d = 1, 2, 3) and the
//! functionals A_α, B_α, D_α, v and M built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::quadrature::{gauss_legendre, Rule1d};

const NORM_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// A unit vector in R^d, d ∈ {1, 2, 3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps components that already have unit norm.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_dim(components.len())?;
        let n = norm(&components);
        if (n - 1.0).abs() > NORM_TOL {
            return invalid(format!("direction norm {n} differs from 1"));
        }
        Ok(Self(components))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalize(components: &[f64]) -> Result<Self> {
        check_dim(components.len())?;
        let n = norm(components);
        if !(n > 0.0 && n.is_finite()) {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        Ok(Self(components.iter().map(|c| c / n).collect()))
    }

    /// Canonical basis vector ê_k (0-based axis).
    pub fn axis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return invalid(format!("axis {k} out of range for dimension {dim}"));
        }
        let mut c = vec![0.0; dim];
        c[k] = 1.0;
        Ok(Self(c))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::normalize(&v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("dimension must be 1, 2 or 3 (got {d})")))
    }
}

/// Surface measure of S_d: 2, 2π, 4π.
pub fn surface_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// Indicator cap `value · [axis·û ≥ cos_radius]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub axis: Direction,
    pub cos_radius: f64,
    pub value: f64,
}

/// How C(û) is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularShape {
    Uniform { value: f64 },
    /// `value · (1 + amplitude · axis·û)`, |amplitude| ≤ 1.
    Dipole { value: f64, amplitude: f64, axis: Direction },
    /// `background + Σ caps` (piecewise constant).
    Caps { background: f64, caps: Vec<Cap> },
    /// Nearest-node lookup in a node/value table.
    Table { nodes: Vec<Direction>, values: Vec<f64> },
}

/// The angular density C(û) together with its symmetry flag and an upper
/// bound usable for rejection sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AngularSpec", into = "AngularSpec")]
pub struct AngularFunction {
    dim: usize,
    shape: AngularShape,
    symmetric: bool,
    sup_bound: f64,
}

/// Serialized form of [`AngularFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngularSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub shape: AngularShape,
}

impl TryFrom<AngularSpec> for AngularFunction {
    type Error = Error;
    fn try_from(s: AngularSpec) -> Result<Self> {
        AngularFunction::new(s.dim, s.shape)
    }
}

impl From<AngularFunction> for AngularSpec {
    fn from(f: AngularFunction) -> Self {
        AngularSpec { dim: f.dim, shape: f.shape }
    }
}

impl AngularFunction {
    pub fn new(dim: usize, shape: AngularShape) -> Result<Self> {
        check_dim(dim)?;
        let sup_bound = match &shape {
            AngularShape::Uniform { value } => {
                if !(*value >= 0.0) {
                    return invalid("uniform angular value must be non-negative");
                }
                *value
            }
            AngularShape::Dipole { value, amplitude, axis } => {
                if axis.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: axis.dim() });
                }
                if !(*value >= 0.0) || !(amplitude.abs() <= 1.0) {
                    return invalid("dipole needs value ≥ 0 and |amplitude| ≤ 1");
                }
                value * (1.0 + amplitude.abs())
            }
            AngularShape::Caps { background, caps } => {
                if !(*background >= 0.0) {
                    return invalid("cap background must be non-negative");
                }
                let mut sup = *background;
                for cap in caps {
                    if cap.axis.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: cap.axis.dim() });
                    }
                    if !(cap.value >= 0.0) || !(-1.0..=1.0).contains(&cap.cos_radius) {
                        return invalid("caps need value ≥ 0 and cos_radius in [-1, 1]");
                    }
                    sup += cap.value;
                }
                sup
            }
            AngularShape::Table { nodes, values } => {
                if nodes.is_empty() || nodes.len() != values.len() {
                    return invalid("table needs matching, non-empty node and value lists");
                }
                if let Some(n) = nodes.iter().find(|n| n.dim() != dim) {
                    return Err(Error::DimensionMismatch { expected: dim, got: n.dim() });
                }
                if values.iter().any(|v| !(*v >= 0.0)) {
                    return invalid("table values must be non-negative");
                }
                values.iter().copied().fold(0.0, f64::max)
            }
        };
        let mut f = Self { dim, shape, symmetric: false, sup_bound };
        f.symmetric = match &f.shape {
            AngularShape::Uniform { .. } => true,
            AngularShape::Dipole { amplitude, .. } => *amplitude == 0.0,
            _ => f.probe_symmetry(),
        };
        Ok(f)
    }

    pub fn uniform(dim: usize, value: f64) -> Result<Self> {
        Self::new(dim, AngularShape::Uniform { value })
    }

    pub fn dipole(value: f64, amplitude: f64, axis: Direction) -> Result<Self> {
        Self::new(axis.dim(), AngularShape::Dipole { value, amplitude, axis })
    }

    /// d = 1 law with C(+1) = `plus`, C(−1) = `minus`.
    pub fn two_point(plus: f64, minus: f64) -> Result<Self> {
        Self::new(
            1,
            AngularShape::Table {
                nodes: vec![Direction(vec![1.0]), Direction(vec![-1.0])],
                values: vec![plus, minus],
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &AngularShape {
        &self.shape
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval(&self, u: &Direction) -> Result<f64> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.dim() });
        }
        Ok(self.eval_raw(u.components()))
    }

    /// Evaluation on a raw unit vector; the caller guarantees the dimension.
    pub(crate) fn eval_raw(&self, u: &[f64]) -> f64 {
        match &self.shape {
            AngularShape::Uniform { value } => *value,
            AngularShape::Dipole { value, amplitude, axis } => value * (1.0 + amplitude * axis.dot(u)),
            AngularShape::Caps { background, caps } => {
                background
                    + caps
                        .iter()
                        .filter(|c| c.axis.dot(u) >= c.cos_radius)
                        .map(|c| c.value)
                        .sum::<f64>()
            }
            AngularShape::Table { nodes, values } => {
                let mut best = 0;
                let mut best_dot = f64::NEG_INFINITY;
                for (i, n) in nodes.iter().enumerate() {
                    let d = n.dot(u);
                    if d > best_dot {
                        best_dot = d;
                        best = i;
                    }
                }
                values[best]
            }
        }
    }

    /// Returns `s · C`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return invalid("angular scale factor must be non-negative");
        }
        let shape = match &self.shape {
            AngularShape::Uniform { value } => AngularShape::Uniform { value: value * s },
            AngularShape::Dipole { value, amplitude, axis } => {
                AngularShape::Dipole { value: value * s, amplitude: *amplitude, axis: axis.clone() }
            }
            AngularShape::Caps { background, caps } => AngularShape::Caps {
                background: background * s,
                caps: caps.iter().map(|c| Cap { value: c.value * s, ..c.clone() }).collect(),
            },
            AngularShape::Table { nodes, values } => AngularShape::Table {
                nodes: nodes.clone(),
                values: values.iter().map(|v| v * s).collect(),
            },
        };
        Self::new(self.dim, shape)
    }

    /// Total mass ∫ C dS.
    pub fn total_mass(&self) -> f64 {
        let q = SphereQuadrature::new(self.dim);
        q.sum(|u| self.eval_raw(u))
    }

    fn probe_symmetry(&self) -> bool {
        let probe = SphereQuadrature::with_resolution(self.dim, 24, 48);
        probe.nodes.chunks(self.dim).all(|u| {
            let minus: Vec<f64> = u.iter().map(|c| -c).collect();
            (self.eval_raw(u) - self.eval_raw(&minus)).abs() <= SYMMETRY_TOL
        })
    }
}

/// Tensor-product rule on S_d: exact two-point sum for d = 1, uniform
/// trapezoid in angle for d = 2, Gauss–Legendre in cos θ × uniform φ for d = 3.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    /// Flattened unit vectors, `dim` components each.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub const DEFAULT_CIRCLE_NODES: usize = 512;
pub const DEFAULT_POLAR_NODES: usize = 128;
pub const DEFAULT_AZIMUTH_NODES: usize = 256;

impl SphereQuadrature {
    /// Default resolution (512 on the circle; 128 × 256 on the 2-sphere).
    pub fn new(dim: usize) -> Self {
        Self::with_resolution(dim, DEFAULT_POLAR_NODES, DEFAULT_AZIMUTH_NODES)
    }

    /// `n_polar` Gauss nodes in cos θ and `n_azimuth` uniform nodes in φ;
    /// for d = 2 the circle gets `2 · n_azimuth` nodes.
    pub fn with_resolution(dim: usize, n_polar: usize, n_azimuth: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                nodes.extend([1.0, -1.0]);
                weights.extend([1.0, 1.0]);
            }
            2 => {
                let n = 2 * n_azimuth;
                let h = 2.0 * PI / n as f64;
                for k in 0..n {
                    let th = h * k as f64;
                    nodes.extend([th.cos(), th.sin()]);
                    weights.push(h);
                }
            }
            3 => {
                let (t, wt) = gauss_legendre(n_polar);
                let h = 2.0 * PI / n_azimuth as f64;
                for (ti, wi) in t.iter().zip(&wt) {
                    let st = (1.0 - ti * ti).sqrt();
                    for k in 0..n_azimuth {
                        let ph = h * k as f64;
                        nodes.extend([st * ph.cos(), st * ph.sin(), *ti]);
                        weights.push(wi * h);
                    }
                }
            }
            _ => panic!("sphere quadrature needs d in 1..=3"),
        }
        Self { dim, nodes, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks(self.dim)
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.nodes().map(|u| Direction(u.to_vec())).collect()
    }

    pub(crate) fn sum(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }
}

/// `Σ_k w_k f(û_k)`; `f_dim` is the dimension of f's domain.
pub fn integrate_sphere(
    f_dim: usize,
    f: impl Fn(&Direction) -> Complex64,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    if f_dim != quad.dim {
        return Err(Error::DimensionMismatch { expected: quad.dim, got: f_dim });
    }
    Ok(quad
        .nodes()
        .zip(&quad.weights)
        .map(|(u, w)| f(&Direction(u.to_vec())) * *w)
        .sum())
}

/// Resolution of the direction-aligned rule used for A_α, B_α, D_α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalResolution {
    /// Uniform azimuth nodes around ẑ (d = 3).
    pub azimuth: usize,
    /// Gauss nodes per graded panel.
    pub per_panel: usize,
    /// Number of geometrically shrinking panels toward ẑ·û = 0.
    pub levels: usize,
    pub ratio: f64,
}

impl Default for FunctionalResolution {
    fn default() -> Self {
        Self { azimuth: DEFAULT_AZIMUTH_NODES, per_panel: 16, levels: 20, ratio: 0.15 }
    }
}

impl FunctionalResolution {
    pub fn doubled(self) -> Self {
        Self { azimuth: 2 * self.azimuth, per_panel: 2 * self.per_panel, levels: self.levels + 4, ..self }
    }
}

/// Sums `w · C(û) · kernel(ẑ·û)` on a rule whose nodes are graded toward the
/// great circle ẑ·û = 0, where the kernels |s|^α and s^α ln|s| are not smooth.
fn aligned_sum(c: &AngularFunction, zhat: &Direction, res: FunctionalResolution, kernel: impl Fn(f64) -> f64) -> f64 {
    let z = zhat.components();
    if let AngularShape::Caps { background, caps } = &c.shape {
        if c.dim > 1 {
            return caps_sum(c, *background, caps, z, res, &kernel);
        }
    }
    match c.dim {
        1 => [1.0, -1.0].iter().map(|&u| c.eval_raw(&[u]) * kernel(z[0] * u)).sum(),
        2 => {
            // θ measured from ẑ; zeros of cos θ at π/2 and 3π/2.
            let perp = [-z[1], z[0]];
            let side = Rule1d::graded_toward_zero(PI / 2.0, res.ratio, res.levels, res.per_panel);
            let mut acc = 0.0;
            for theta0 in [PI / 2.0, 3.0 * PI / 2.0] {
                for sign in [-1.0, 1.0] {
                    for (x, w) in side.nodes.iter().zip(&side.weights) {
                        let th = theta0 + sign * x;
                        let (s, cs) = (th.cos(), th.sin());
                        let u = [s * z[0] + cs * perp[0], s * z[1] + cs * perp[1]];
                        acc += w * c.eval_raw(&u) * kernel(s);
                    }
                }
            }
            acc
        }
        3 => {
            let (e1, e2) = orthonormal_complement(z);
            let side = Rule1d::graded_toward_zero(1.0, res.ratio, res.levels, res.per_panel);
            // Uniform and dipole densities are polynomials of degree ≤ 1 in û,
            // so a handful of azimuth nodes integrates each ring exactly.
            let n_az = match c.shape {
                AngularShape::Uniform { .. } => 1,
                AngularShape::Dipole { .. } => 4,
                _ => res.azimuth,
            };
            let h = 2.0 * PI / n_az as f64;
            let trig: Vec<(f64, f64)> = (0..n_az).map(|k| (h * k as f64).sin_cos()).collect();
            let mut acc = 0.0;
            for sign in [-1.0, 1.0] {
                for (x, w) in side.nodes.iter().zip(&side.weights) {
                    let t = sign * x;
                    let st = (1.0 - t * t).max(0.0).sqrt();
                    let mut ring = 0.0;
                    for &(sp, cp) in &trig {
                        let u = [
                            t * z[0] + st * (cp * e1[0] + sp * e2[0]),
                            t * z[1] + st * (cp * e1[1] + sp * e2[1]),
                            t * z[2] + st * (cp * e1[2] + sp * e2[2]),
                        ];
                        ring += c.eval_raw(&u);
                    }
                    acc += w * h * ring * kernel(t);
                }
            }
            acc
        }
        _ => unreachable!(),
    }
}

/// Composite rule on [a, b] graded toward both ends.
fn graded_segment(a: f64, b: f64, res: FunctionalResolution) -> impl Iterator<Item = (f64, f64)> {
    let half = Rule1d::graded_toward_zero(0.5 * (b - a), res.ratio, res.levels, res.per_panel);
    let left: Vec<(f64, f64)> = half.nodes.iter().zip(&half.weights).map(|(x, w)| (a + x, *w)).collect();
    let right: Vec<(f64, f64)> = half.nodes.iter().zip(&half.weights).map(|(x, w)| (b - x, *w)).collect();
    left.into_iter().chain(right)
}

fn sorted_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| *p > lo && *p < hi);
    pts.extend([lo, hi]);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

/// Cap densities are piecewise constant, so split the integral at every
/// place the cap boundaries cross the integration coordinate. In d = 3 the
/// azimuthal ring integral of a cap indicator is done in closed form.
fn caps_sum(
    c: &AngularFunction,
    background: f64,
    caps: &[Cap],
    z: &[f64],
    res: FunctionalResolution,
    kernel: &impl Fn(f64) -> f64,
) -> f64 {
    if c.dim == 2 {
        let perp = [-z[1], z[0]];
        let mut pts = vec![PI / 2.0, PI, 1.5 * PI];
        for cap in caps {
            let a = cap.axis.components();
            let theta_a = (a[0] * perp[0] + a[1] * perp[1]).atan2(a[0] * z[0] + a[1] * z[1]);
            let w = cap.cos_radius.clamp(-1.0, 1.0).acos();
            if w < PI {
                pts.push((theta_a - w).rem_euclid(2.0 * PI));
                pts.push((theta_a + w).rem_euclid(2.0 * PI));
            }
        }
        let br = sorted_breaks(pts, 0.0, 2.0 * PI);
        return br
            .windows(2)
            .flat_map(|p| graded_segment(p[0], p[1], res))
            .map(|(th, w)| {
                let (sn, cs) = th.sin_cos();
                let u = [cs * z[0] + sn * perp[0], cs * z[1] + sn * perp[1]];
                w * c.eval_raw(&u) * kernel(cs)
            })
            .sum();
    }
    // d = 3: û = t ẑ + √(1−t²)(cos φ e₁ + sin φ e₂).
    let geo: Vec<(f64, f64, f64)> = caps
        .iter()
        .map(|cap| {
            let az = dot(cap.axis.components(), z).clamp(-1.0, 1.0);
            (az, (1.0 - az * az).max(0.0).sqrt(), cap.cos_radius)
        })
        .collect();
    let mut pts = vec![0.0];
    for &(az, _, cr) in &geo {
        let (ta, rho) = (az.acos(), cr.clamp(-1.0, 1.0).acos());
        pts.push((ta - rho).cos());
        pts.push((ta + rho).cos());
    }
    let br = sorted_breaks(pts, -1.0, 1.0);
    let ring = |t: f64| {
        let st = (1.0 - t * t).max(0.0).sqrt();
        let mut acc = 2.0 * PI * background;
        for (cap, &(az, ap, cr)) in caps.iter().zip(&geo) {
            // a·û = t·az + st·ap·cos φ ≥ cr on an arc of length 2·acos(x).
            let span = st * ap;
            let covered = if span <= 1e-15 {
                if t * az >= cr { 2.0 * PI } else { 0.0 }
            } else {
                2.0 * ((cr - t * az) / span).clamp(-1.0, 1.0).acos()
            };
            acc += cap.value * covered;
        }
        acc
    };
    br.windows(2).flat_map(|p| graded_segment(p[0], p[1], res)).map(|(t, w)| w * ring(t) * kernel(t)).sum()
}

fn orthonormal_complement(z: &[f64]) -> ([f64; 3], [f64; 3]) {
    let helper = if z[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = dot(&helper, z);
    let mut e1 = [helper[0] - p * z[0], helper[1] - p * z[1], helper[2] - p * z[2]];
    let n1 = norm(&e1);
    e1.iter_mut().for_each(|x| *x /= n1);
    let e2 = [
        z[1] * e1[2] - z[2] * e1[1],
        z[2] * e1[0] - z[0] * e1[2],
        z[0] * e1[1] - z[1] * e1[0],
    ];
    (e1, e2)
}

fn check_functional_args(c: &AngularFunction, alpha: f64, zhat: &Direction) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be positive (got {alpha})"));
    }
    if zhat.dim() != c.dim {
        return Err(Error::DimensionMismatch { expected: c.dim, got: zhat.dim() });
    }
    Ok(())
}

fn is_integer(alpha: f64, k: f64) -> bool {
    (alpha - k).abs() < 1e-12
}

/// A_α(ẑ) = ∫ C(û) |ẑ·û|^α dS.
pub fn a_alpha(c: &AngularFunction, alpha: f64, zhat: &Direction) -> Result<f64> {
    a_alpha_with(c, alpha, zhat, FunctionalResolution::default())
}

pub fn a_alpha_with(c: &AngularFunction, alpha: f64, zhat: &Direction, res: FunctionalResolution) -> Result<f64> {
    check_functional_args(c, alpha, zhat)?;
    if is_integer(alpha, 2.0) {
        // Polynomial integrand: use the product rule so that A₂ = 2 ẑᵀMẑ exactly.
        let m = gaussian_matrix_m(c);
        return Ok(2.0 * m.quad_form(zhat.components()));
    }
    Ok(aligned_sum(c, zhat, res, |s| s.abs().powf(alpha)))
}

/// B_α(ẑ) = ∫ C(û) sgn(ẑ·û) |ẑ·û|^α dS.
pub fn b_alpha(c: &AngularFunction, alpha: f64, zhat: &Direction) -> Result<f64> {
    b_alpha_with(c, alpha, zhat, FunctionalResolution::default())
}

pub fn b_alpha_with(c: &AngularFunction, alpha: f64, zhat: &Direction, res: FunctionalResolution) -> Result<f64> {
    check_functional_args(c, alpha, zhat)?;
    if c.is_symmetric() {
        return Ok(0.0);
    }
    if is_integer(alpha, 1.0) {
        let v = drift_vector_v(c);
        return Ok(-zhat.dot(&v));
    }
    Ok(aligned_sum(c, zhat, res, |s| s.signum() * s.abs().powf(alpha)))
}

/// D_α(ẑ) = ∫ C(û) (ẑ·û)^α ln|ẑ·û| dS for α ∈ {1, 2}.
pub fn d_alpha(c: &AngularFunction, alpha: f64, zhat: &Direction) -> Result<f64> {
    d_alpha_with(c, alpha, zhat, FunctionalResolution::default())
}

pub fn d_alpha_with(c: &AngularFunction, alpha: f64, zhat: &Direction, res: FunctionalResolution) -> Result<f64> {
    check_functional_args(c, alpha, zhat)?;
    let power = if is_integer(alpha, 1.0) {
        1
    } else if is_integer(alpha, 2.0) {
        2
    } else {
        return invalid(format!("D_alpha is only defined for alpha in {{1, 2}} (got {alpha})"));
    };
    if power == 1 && c.is_symmetric() {
        return Ok(0.0);
    }
    Ok(aligned_sum(c, zhat, res, |s| if s == 0.0 { 0.0 } else { s.powi(power) * s.abs().ln() }))
}

/// β_α(ẑ) = B_α / A_α, or 0 where A_α vanishes.
pub fn beta_alpha(c: &AngularFunction, alpha: f64, zhat: &Direction) -> Result<f64> {
    let a = a_alpha(c, alpha, zhat)?;
    let b = b_alpha(c, alpha, zhat)?;
    Ok(if a > 0.0 { (b / a).clamp(-1.0, 1.0) } else { 0.0 })
}

/// v = −∫ C(û) û dS.
pub fn drift_vector_v(c: &AngularFunction) -> Vec<f64> {
    let mut v = vec![0.0; c.dim];
    if c.is_symmetric() {
        return v;
    }
    if let (AngularShape::Caps { caps, .. }, true) = (&c.shape, c.dim > 1) {
        for cap in caps {
            let (first, _, _) = cap_moments(c.dim, cap.cos_radius);
            for (vi, ai) in v.iter_mut().zip(cap.axis.components()) {
                *vi -= cap.value * first * ai;
            }
        }
        return v;
    }
    let q = SphereQuadrature::new(c.dim);
    for (u, w) in q.nodes().zip(q.weights()) {
        let cw = w * c.eval_raw(u);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= cw * ui;
        }
    }
    v
}

/// Moments of the cap a·û ≥ c: ∫ a·û dS, ∫ (a·û)² dS, and ∫ (e·û)² dS for
/// any unit e ⟂ a.
fn cap_moments(dim: usize, cos_radius: f64) -> (f64, f64, f64) {
    let c = cos_radius.clamp(-1.0, 1.0);
    if dim == 2 {
        let w = c.acos();
        let (sw, cw) = w.sin_cos();
        (2.0 * sw, w + sw * cw, w - sw * cw)
    } else {
        let along = 2.0 * PI * (1.0 - c * c * c) / 3.0;
        (PI * (1.0 - c * c), along, PI * (1.0 - c) - 0.5 * along)
    }
}

/// [M]_ij = ½ ∫ û_i û_j C(û) dS.
pub fn gaussian_matrix_m(c: &AngularFunction) -> Matrix {
    let d = c.dim;
    let mut m = Matrix::zeros(d);
    if let (AngularShape::Caps { background, caps }, true) = (&c.shape, d > 1) {
        let surf = if d == 2 { 2.0 * PI } else { 4.0 * PI };
        for i in 0..d {
            m.set(i, i, 0.5 * background * surf / d as f64);
        }
        for cap in caps {
            let (_, along, across) = cap_moments(d, cap.cos_radius);
            let a = cap.axis.components();
            for i in 0..d {
                for j in 0..d {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let aa = a[i] * a[j];
                    m.set(i, j, m.get(i, j) + 0.5 * cap.value * (along * aa + across * (delta - aa)));
                }
            }
        }
        return m;
    }
    let q = SphereQuadrature::new(d);
    for (u, w) in q.nodes().zip(q.weights()) {
        let cw = 0.5 * w * c.eval_raw(u);
        for i in 0..d {
            for j in 0..=i {
                m.set(i, j, m.get(i, j) + cw * u[i] * u[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            m.set(j, i, m.get(i, j));
        }
    }
    m
}
