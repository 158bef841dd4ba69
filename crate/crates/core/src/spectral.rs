//! Fourier symbols, symbol norms, admissibility, and numerical Green
//! function synthesis by inverse FFT of `Ĝ = (2π)^{−d/2} l̂⁻¹`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, GridSpec};
use crate::opcalc::{DiffOperator, VectorOperator};
use crate::poly::{PolyEvaluator, SparsePoly, TermsRepr};
use crate::quad::gauss_legendre;

/// Parity of a symbol under `x ↦ −x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

/// `p̂(x) = Σ c_α (ix)^α`, stored with the powers of `i` folded into the
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSymbol(SparsePoly<Complex64>);

impl FourierSymbol {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.0.eval(x)
    }

    pub fn as_poly(&self) -> &SparsePoly<Complex64> {
        &self.0
    }

    pub fn parity(&self) -> Parity {
        let mut orders = self.0.terms().map(|(a, _)| a.is_even());
        match orders.next() {
            None => Parity::Even,
            Some(first) => {
                if orders.all(|e| e == first) {
                    if first {
                        Parity::Even
                    } else {
                        Parity::Odd
                    }
                } else {
                    Parity::Neither
                }
            }
        }
    }
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn symbol_of(op: &DiffOperator) -> FourierSymbol {
    FourierSymbol(
        op.as_poly()
            .map_coeffs(|a, c| i_power(a.order()) * c),
    )
}

/// The real, even, nonnegative polynomial `l̂(x) = Σ_j |p̂_j(x)|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermsRepr", into = "TermsRepr")]
pub struct SymbolNorm(SparsePoly<f64>);

impl SymbolNorm {
    pub fn from_poly(p: SparsePoly<f64>) -> Self {
        SymbolNorm(p)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }

    pub fn degree(&self) -> u32 {
        self.0.degree()
    }

    pub fn as_poly(&self) -> &SparsePoly<f64> {
        &self.0
    }

    /// Value at the origin, the squared sum of the order-0 coefficients.
    pub fn at_origin(&self) -> f64 {
        self.eval(&vec![0.0; self.dim()])
    }

    /// Spectral density `Ĝ(y) = (2π)^{−d/2} / l̂(y)`.
    pub fn spectral_density(&self, y: &[f64]) -> f64 {
        (2.0 * PI).powf(-(self.dim() as f64) / 2.0) / self.eval(y)
    }

    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        self.0.approx_eq(&other.0, rel)
    }
}

impl From<SymbolNorm> for TermsRepr {
    fn from(s: SymbolNorm) -> Self {
        TermsRepr::from(&s.0)
    }
}

impl TryFrom<TermsRepr> for SymbolNorm {
    type Error = Error;

    fn try_from(r: TermsRepr) -> Result<Self> {
        Ok(SymbolNorm(SparsePoly::try_from(r)?))
    }
}

pub fn symbol_norm(vp: &VectorOperator) -> SymbolNorm {
    let dim = vp.dim();
    let sum = vp
        .components()
        .iter()
        .fold(SparsePoly::<Complex64>::zero(dim), |acc, p| {
            let s = symbol_of(p).0;
            let sq = s.try_mul(&s.conj()).expect("same dimension");
            acc.try_add(&sq).expect("same dimension")
        });
    SymbolNorm(sum.map_coeffs(|_, c| c.re))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Admissible,
    Inadmissible(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub dim: usize,
    /// `l̂(0)`.
    pub origin_value: f64,
    /// Smallest value found on the sample grid (after local refinement).
    pub sampled_min: f64,
    pub sampled_min_at: Vec<f64>,
    /// Half-width of the sampled box; no zeros can lie outside it.
    pub sample_radius: f64,
    /// Total degree `2m` of the leading form.
    pub leading_degree: u32,
    /// Minimum of the leading form over sampled unit directions.
    pub leading_form_min: f64,
    pub verdict: Verdict,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Admissible => write!(f, "admissible")?,
            Verdict::Inadmissible(r) => write!(f, "inadmissible: {r}")?,
        }
        write!(
            f,
            " (degree {}, l̂(0)={:e}, min l̂={:e})",
            self.leading_degree, self.origin_value, self.sampled_min
        )
    }
}

/// Quasi-uniform unit directions: `±1` in 1-d, equispaced angles in 2-d,
/// a Fibonacci lattice in 3-d.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    let mut v = vec![r * t.cos(), r * t.sin(), z];
                    v.resize(dim, 0.0);
                    v
                })
                .collect()
        }
    }
}

const DIRECTIONS: usize = 1000;

pub fn check_admissible(sn: &SymbolNorm) -> AdmissibilityReport {
    let dim = sn.dim();
    let origin_value = sn.at_origin();
    let leading_degree = sn.degree();
    let lead = sn.as_poly().homogeneous_part(leading_degree);
    let lead_values: Vec<f64> = sphere_directions(dim, DIRECTIONS)
        .iter()
        .map(|u| lead.eval(u))
        .collect();
    let leading_form_min = lead_values.iter().copied().fold(f64::INFINITY, f64::min);
    let leading_form_max = lead_values.iter().copied().fold(0.0, f64::max);

    // Outside |y| > Σ|c_lower|/lead_min the leading form dominates.
    let lower_sum: f64 = sn
        .as_poly()
        .terms()
        .filter(|(a, _)| a.order() < leading_degree)
        .map(|(_, c)| c.abs())
        .sum();
    let sample_radius = if leading_form_min > 1e-10 * leading_form_max {
        (lower_sum / leading_form_min).max(1.0)
    } else {
        10.0
    };
    let (sampled_min, sampled_min_at) = sampled_minimum(sn, sample_radius);

    let zero_tol = 1e-12 * origin_value.max(f64::MIN_POSITIVE);
    let verdict = if !(origin_value > 0.0) {
        Verdict::Inadmissible(format!("l̂(0)={origin_value} is not positive"))
    } else if sampled_min <= zero_tol {
        Verdict::Inadmissible(format!(
            "l̂ vanishes near y={sampled_min_at:?} (l̂={sampled_min:e})"
        ))
    } else if leading_degree as usize <= dim {
        Verdict::Inadmissible(format!(
            "leading degree 2m={leading_degree} <= d={dim}: l̂⁻¹ is not integrable"
        ))
    } else if !(leading_form_min > 1e-10 * leading_form_max) {
        Verdict::Inadmissible(format!(
            "leading form of degree {leading_degree} is not positive on all directions (min {leading_form_min:e})"
        ))
    } else {
        Verdict::Admissible
    };

    AdmissibilityReport {
        dim,
        origin_value,
        sampled_min,
        sampled_min_at,
        sample_radius,
        leading_degree,
        leading_form_min,
        verdict,
    }
}

fn sampled_minimum(sn: &SymbolNorm, radius: f64) -> (f64, Vec<f64>) {
    let dim = sn.dim();
    let per_axis: usize = match dim {
        1 => 4001,
        2 => 201,
        _ => 61,
    };
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let total = per_axis.pow(dim as u32);
    let mut best = (f64::INFINITY, vec![0.0; dim]);
    let mut y = vec![0.0; dim];
    for flat in 0..total {
        let mut rem = flat;
        for slot in y.iter_mut().rev() {
            *slot = -radius + (rem % per_axis) as f64 * step;
            rem /= per_axis;
        }
        let v = sn.eval(&y);
        if v < best.0 {
            best = (v, y.clone());
        }
    }
    // Pattern search around the best sample.
    let (mut fmin, mut at) = best;
    let mut h = step;
    while h > 1e-12 * radius {
        let mut improved = false;
        for axis in 0..dim {
            for sign in [-1.0, 1.0] {
                let mut trial = at.clone();
                trial[axis] += sign * h;
                let v = sn.eval(&trial);
                if v < fmin {
                    fmin = v;
                    at = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (fmin, at)
}

/// Exponential decay rate of the Green function: the distance from the real
/// axis to the nearest zero of `τ ↦ l̂(iτ e_k)`, minimised over axes, with a
/// coefficient-ratio estimate when no such zero exists.
pub fn decay_rate(sn: &SymbolNorm) -> f64 {
    let dim = sn.dim();
    let l0 = sn.at_origin();
    let coef_rate = (1..=sn.degree())
        .filter_map(|k| {
            let c = sn
                .as_poly()
                .homogeneous_part(k)
                .terms()
                .map(|(_, c)| c.abs())
                .fold(0.0, f64::max);
            (c > 0.0).then(|| (l0 / c).powf(1.0 / k as f64))
        })
        .fold(f64::INFINITY, f64::min);
    let scan_to = 10.0 * coef_rate.max(1e-6);
    let axis_root = (0..dim)
        .filter_map(|axis| {
            // l̂(iτ e_k) only involves even powers along the axis, so it is real.
            let g = |tau: f64| -> f64 {
                sn.as_poly()
                    .terms()
                    .filter(|(a, _)| {
                        a.exponents()
                            .iter()
                            .enumerate()
                            .all(|(j, &e)| j == axis || e == 0)
                    })
                    .map(|(a, c)| c * (tau.powi(a.exponents()[axis] as i32) * i_power(a.exponents()[axis]).re))
                    .sum()
            };
            smallest_positive_root(g, scan_to)
        })
        .fold(f64::INFINITY, f64::min);
    if axis_root.is_finite() {
        axis_root
    } else {
        coef_rate
    }
}

fn smallest_positive_root<F: Fn(f64) -> f64>(g: F, upto: f64) -> Option<f64> {
    let n = 20_000;
    let step = upto / n as f64;
    let g0 = g(0.0);
    let mut prev = (0.0, g0);
    for i in 1..=n {
        let t = i as f64 * step;
        let v = g(t);
        if v == 0.0 || v.signum() != prev.1.signum() {
            // A sign change or an exact zero; a double root without sign change
            // still shows as a near-zero minimum, caught below.
            let (mut lo, mut hi) = (prev.0, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == prev.1.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        if v.abs() <= 1e-10 * g0.abs() {
            return Some(t);
        }
        // Even-multiplicity roots touch zero without a sign change; refine
        // every local minimum of |g| and accept it if it reaches zero.
        let next = g(t + step);
        if v.abs() < prev.1.abs() && v.abs() <= next.abs() {
            let (tm, vm) = golden_min(|u| g(u).abs(), t - step, t + step);
            if vm <= 1e-10 * g0.abs() {
                return Some(tm);
            }
        }
        prev = (t, v);
    }
    None
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Default grid for synthesis: `R = c_d/ρ` with `ρ` from [`decay_rate`] and
/// `c_d` = 20, 16, 12, and 4096, 256 or 64 points per axis in 1, 2 or 3
/// dimensions. The fold makes node values exact up to periodic images at
/// distance `2R`, so higher dimensions trade extent for resolution.
pub fn default_grid(sn: &SymbolNorm) -> Result<GridSpec> {
    let dim = sn.dim();
    let (points, reach) = match dim {
        1 => (4096, 20.0),
        2 => (256, 16.0),
        3 => (64, 12.0),
        _ => {
            return Err(Error::Grid(format!(
                "synthesis is limited to d <= 3, got {dim}"
            )))
        }
    };
    let rho = decay_rate(sn);
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Grid(format!("cannot estimate decay rate ({rho})")));
    }
    GridSpec::new(dim, reach / rho, points)
}

/// Green function sampled on a tensor grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridKernel {
    grid: GridSpec,
    samples: Vec<f64>,
    /// `Ĝ` on the dual grid; absent when not retained.
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol: Option<SymbolNorm>,
    coarse_warning: bool,
    imag_residue: f64,
}

#[derive(Deserialize)]
struct GridKernelRepr {
    grid: GridSpec,
    samples: Vec<f64>,
    #[serde(default)]
    spectral: Option<Vec<f64>>,
    #[serde(default)]
    symbol: Option<SymbolNorm>,
    #[serde(default)]
    coarse_warning: bool,
    #[serde(default)]
    imag_residue: f64,
}

impl<'de> Deserialize<'de> for GridKernel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = GridKernelRepr::deserialize(de)?;
        GridKernel::from_parts(r.grid, r.samples, r.spectral, r.symbol, r.coarse_warning, r.imag_residue)
            .map_err(serde::de::Error::custom)
    }
}

impl GridKernel {
    fn from_parts(
        grid: GridSpec,
        samples: Vec<f64>,
        spectral: Option<Vec<f64>>,
        symbol: Option<SymbolNorm>,
        coarse_warning: bool,
        imag_residue: f64,
    ) -> Result<Self> {
        grid.validate()?;
        if samples.len() != grid.len() {
            return Err(Error::Malformed(format!(
                "grid kernel has {} samples, grid needs {}",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(s) = &spectral {
            if s.len() != grid.len() {
                return Err(Error::Malformed(format!(
                    "grid kernel has {} spectral samples, grid needs {}",
                    s.len(),
                    grid.len()
                )));
            }
        }
        if let Some(sym) = &symbol {
            if sym.dim() != grid.dim {
                return Err(Error::DimensionMismatch {
                    expected: grid.dim,
                    got: sym.dim(),
                });
            }
        }
        Ok(GridKernel {
            grid,
            samples,
            spectral,
            symbol,
            coarse_warning,
            imag_residue,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectral_samples(&self) -> Option<&[f64]> {
        self.spectral.as_deref()
    }

    pub fn symbol(&self) -> Option<&SymbolNorm> {
        self.symbol.as_ref()
    }

    pub fn coarse_warning(&self) -> bool {
        self.coarse_warning
    }

    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    pub fn value_at_origin(&self) -> f64 {
        let c = self.grid.center();
        self.samples[self.grid.flat_index(&vec![c; self.grid.dim])]
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|G(x) − G(−x)|` over grid nodes.
    pub fn evenness_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.samples[i] - self.samples[self.grid.mirror(i)]).abs())
            .fold(0.0, f64::max)
    }

    /// Drops the retained spectral density.
    pub fn without_spectral(mut self) -> Self {
        self.spectral = None;
        self.symbol = None;
        self
    }

    /// `Ĝ(y)` from the retained symbol, if any.
    pub fn spectral_density(&self, y: &[f64]) -> Option<f64> {
        self.symbol.as_ref().map(|s| s.spectral_density(y))
    }

    /// Tensor-product cubic interpolation of the grid samples; zero outside
    /// the grid box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let m = g.points as isize;
        let h = g.spacing();
        let mut base = Vec::with_capacity(g.dim);
        let mut weights = Vec::with_capacity(g.dim);
        for &xa in x {
            if !(xa.abs() <= g.extent) {
                return 0.0;
            }
            let u = xa / h + g.center() as f64;
            let i0 = u.floor();
            let t = u - i0;
            base.push(i0 as isize);
            weights.push([
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ]);
        }
        let mut sum = 0.0;
        let mut idx = vec![0usize; g.dim];
        for combo in 0..4usize.pow(g.dim as u32) {
            let mut rem = combo;
            let mut w = 1.0;
            for a in (0..g.dim).rev() {
                let o = rem % 4;
                rem /= 4;
                w *= weights[a][o];
                idx[a] = (base[a] + o as isize - 1).rem_euclid(m) as usize;
            }
            sum += w * self.samples[g.flat_index(&idx)];
        }
        sum
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Inverse-transforms an arbitrary spectral density by the plain trapezoid
/// rule on the dual grid (no alias folding), for densities that have decayed
/// to negligible values by the dual-grid edge.
pub fn inverse_density<F>(grid: &GridSpec, density: F) -> Result<GridKernel>
where
    F: Fn(&[f64]) -> f64,
{
    grid.validate()?;
    let spectral = grid.sample_dual(density);
    if let Some(bad) = spectral.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Grid(format!("invalid spectral sample {bad}")));
    }
    let g0 = spectral[grid.flat_index(&vec![grid.center(); grid.dim])];
    let coarse_warning = (0..grid.len())
        .filter(|&k| grid.is_boundary(k))
        .any(|k| spectral[k] > 1e-6 * g0);
    // Mirror-average: the Nyquist planes have no partner on the grid.
    let data: Vec<Complex64> = (0..grid.len())
        .map(|k| Complex64::new(0.5 * (spectral[k] + spectral[grid.mirror(k)]), 0.0))
        .collect();
    let values = inverse_transform(grid, &data);
    let samples: Vec<f64> = values.iter().map(|v| v.re).collect();
    let imag_residue = values.iter().fold(0.0, |m: f64, v| m.max(v.im.abs()));
    GridKernel::from_parts(*grid, samples, Some(spectral), None, coarse_warning, imag_residue)
}

/// Images per axis added explicitly when folding `Ĝ` onto the dual grid.
fn image_count(dim: usize) -> i64 {
    match dim {
        1 => 8,
        2 => 4,
        _ => 2,
    }
}

/// Inverse-transforms `Ĝ = (2π)^{−d/2} l̂⁻¹` onto `grid`.
///
/// The trapezoid rule over all of `ℝ^d` is evaluated exactly at grid nodes by
/// folding every alias `Ĝ(y_k + mW)`, `W = 2π/h`, onto its dual node: images
/// with `|m|_∞ ≤ K` are summed and the remainder is replaced by its integral
/// (midpoint rule with the second-order Euler–Maclaurin term), fitted as a
/// quadratic in `y_k`.
pub fn synthesize_green(sn: &SymbolNorm, grid: &GridSpec) -> Result<GridKernel> {
    grid.validate()?;
    if grid.dim != sn.dim() {
        return Err(Error::DimensionMismatch {
            expected: sn.dim(),
            got: grid.dim,
        });
    }
    let report = check_admissible(sn);
    if let Verdict::Inadmissible(reason) = &report.verdict {
        return Err(Error::Inadmissible(reason.clone()));
    }

    let dim = grid.dim;
    let period = grid.dual_period();
    let images = image_count(dim);
    let tail = TailModel::fit(sn, period, images);

    let g0 = sn.spectral_density(&vec![0.0; dim]);
    let coarse_warning = (0..dim).any(|a| {
        let mut y = vec![0.0; dim];
        y[a] = -(grid.center() as f64) * grid.dual_spacing();
        sn.spectral_density(&y) > 1e-6 * g0
    });

    let spectral = grid.sample_dual(|y| sn.spectral_density(y));
    if let Some(bad) = spectral.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Grid(format!("non-positive spectral sample {bad}")));
    }

    let offsets = image_offsets(dim, images, period);
    let evaluator = PolyEvaluator::new(sn.as_poly());
    let norm = (2.0 * PI).powf(-(dim as f64) / 2.0);
    let mut shifted = vec![0.0; dim];
    let mut powers = Vec::new();
    let folded: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            let y = grid.dual_node(flat);
            let mut acc = 0.0;
            for off in &offsets {
                for ((s, yi), oi) in shifted.iter_mut().zip(&y).zip(off) {
                    *s = yi + oi;
                }
                acc += 1.0 / evaluator.eval_with(&shifted, &mut powers);
            }
            Complex64::new(norm * acc + tail.eval(&y), 0.0)
        })
        .collect();
    // The exact periodization is even and W-periodic, so on the Nyquist
    // planes (index 0 on some axis) it is symmetric under the grid mirror.
    // The truncated fold is only approximately so; average to restore it.
    let folded: Vec<Complex64> = (0..grid.len())
        .map(|flat| 0.5 * (folded[flat] + folded[grid.mirror(flat)]))
        .collect();

    let values = inverse_transform(grid, &folded);
    let samples: Vec<f64> = values.iter().map(|v| v.re).collect();
    let max_abs = samples.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let imag_residue = values.iter().fold(0.0, |m: f64, v| m.max(v.im.abs()));
    if imag_residue > 1e-10 * max_abs {
        return Err(Error::Grid(format!(
            "imaginary residue {imag_residue:e} exceeds 1e-10·max|G|"
        )));
    }
    let kernel = GridKernel::from_parts(
        *grid,
        samples,
        Some(spectral),
        Some(sn.clone()),
        coarse_warning,
        imag_residue,
    )?;
    let defect = kernel.evenness_defect();
    if defect > 1e-10 * max_abs {
        return Err(Error::Grid(format!(
            "synthesized kernel is not even: defect {defect:e}"
        )));
    }
    Ok(kernel)
}

fn image_offsets(dim: usize, images: i64, period: f64) -> Vec<Vec<f64>> {
    let side = (2 * images + 1) as usize;
    (0..side.pow(dim as u32))
        .map(|mut flat| {
            let mut v = vec![0.0; dim];
            for slot in v.iter_mut().rev() {
                *slot = ((flat % side) as i64 - images) as f64 * period;
                flat /= side;
            }
            v
        })
        .collect()
}

/// Quadratic model `T(y) = T₀ + Σ a_i y_i² + Σ_{i<j} b_ij y_i y_j` of the
/// alias remainder per dual cell.
struct TailModel {
    t0: f64,
    diag: Vec<f64>,
    cross: Vec<(usize, usize, f64)>,
}

impl TailModel {
    fn fit(sn: &SymbolNorm, period: f64, images: i64) -> Self {
        let dim = sn.dim();
        let half = (images as f64 + 0.5) * period;
        let quad = TailQuadrature::new(dim);
        let eval = |y: &[f64]| quad.remainder(sn, half, period, y);
        let s = 0.25 * period;
        let zero = vec![0.0; dim];
        let t0 = eval(&zero);
        let diag: Vec<f64> = (0..dim)
            .map(|i| {
                let mut y = zero.clone();
                y[i] = s;
                (eval(&y) - t0) / (s * s)
            })
            .collect();
        let mut cross = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let mut y = zero.clone();
                y[i] = s;
                y[j] = s;
                let b = (eval(&y) - t0 - (diag[i] + diag[j]) * s * s) / (s * s);
                cross.push((i, j, b));
            }
        }
        TailModel { t0, diag, cross }
    }

    fn eval(&self, y: &[f64]) -> f64 {
        let mut v = self.t0;
        for (a, yi) in self.diag.iter().zip(y) {
            v += a * yi * yi;
        }
        for &(i, j, b) in &self.cross {
            v += b * y[i] * y[j];
        }
        v
    }
}

struct TailQuadrature {
    dim: usize,
    face: Vec<(Vec<f64>, f64)>,
    radial: Vec<(f64, f64)>,
}

impl TailQuadrature {
    fn new(dim: usize) -> Self {
        let (xv, wv) = gauss_legendre(12);
        let (xt, wt) = gauss_legendre(24);
        let side = xv.len();
        let face = (0..side.pow((dim - 1) as u32))
            .map(|mut flat| {
                let mut v = Vec::with_capacity(dim - 1);
                let mut w = 1.0;
                for _ in 0..dim - 1 {
                    v.push(xv[flat % side]);
                    w *= wv[flat % side];
                    flat /= side;
                }
                (v, w)
            })
            .collect();
        // τ ∈ (0, 1)
        let radial = xt
            .iter()
            .zip(&wt)
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        TailQuadrature { dim, face, radial }
    }

    /// `Σ_{m outside the image box} Ĝ(y + mW)`, approximated by
    /// `W^{−d}[∫_{|u|_∞>A} Ĝ(u+y) du + (W²/24) ∮_{|u|_∞=A} ∇Ĝ(u+y)·n dS]`.
    fn remainder(&self, sn: &SymbolNorm, half: f64, period: f64, y: &[f64]) -> f64 {
        let dim = self.dim;
        let norm = (2.0 * PI).powf(-(dim as f64) / 2.0);
        let grads: Vec<SparsePoly<f64>> = (0..dim).map(|a| sn.as_poly().partial(a)).collect();
        let mut volume = 0.0;
        let mut surface = 0.0;
        let mut u = vec![0.0; dim];
        for axis in 0..dim {
            for sign in [-1.0, 1.0] {
                for (v, wv) in &self.face {
                    let mut dir = Vec::with_capacity(dim);
                    let mut vi = v.iter();
                    for b in 0..dim {
                        dir.push(if b == axis { sign } else { *vi.next().unwrap() });
                    }
                    for &(tau, wt) in &self.radial {
                        let t = half / tau;
                        for b in 0..dim {
                            u[b] = t * dir[b] + y[b];
                        }
                        let jac = t.powi(dim as i32 - 1) * half / (tau * tau);
                        volume += wv * wt * jac * sn.spectral_density(&u);
                    }
                    for b in 0..dim {
                        u[b] = half * dir[b] + y[b];
                    }
                    let l = sn.eval(&u);
                    let dn = sign * grads[axis].eval(&u);
                    // ∂_n Ĝ = −(2π)^{−d/2} ∂_n l̂ / l̂²
                    surface += wv * half.powi(dim as i32 - 1) * (-norm * dn / (l * l));
                }
            }
        }
        (volume + period * period / 24.0 * surface) / period.powi(dim as i32)
    }
}
