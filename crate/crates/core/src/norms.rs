//! Generalized Sobolev seminorm `Σ_j ‖P_j f‖²` and native norm
//! `(2π)^{−d/2} ∫ |f̂|²/Ĝ` of grid-sampled functions, and checks that the two
//! coincide when `G` is the Green function of `P*ᵀP`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, GridSpec};
use crate::kernels::{catalog_match, gaussian, truncation_schedule, Kernel, ScheduleFamily};
use crate::opcalc::VectorOperator;
use crate::spectral::{check_admissible, symbol_norm, symbol_of, synthesize_green, Verdict};

/// Boundary samples may not exceed this fraction of `max |f|`.
pub const BOUNDARY_DECAY: f64 = 1e-6;
/// Relative agreement required between the two seminorm routes.
pub const ROUTE_TOL: f64 = 1e-8;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Real samples of `f` on a [`GridSpec`], optionally with the function itself
/// so the grid can be refined.
#[derive(Clone)]
pub struct SampledFunction {
    grid: GridSpec,
    samples: Vec<f64>,
    evaluator: Option<Evaluator>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("grid", &self.grid)
            .field("samples", &self.samples.len())
            .field("analytic", &self.evaluator.is_some())
            .finish()
    }
}

impl SampledFunction {
    pub fn new(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if samples.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("non-finite sample {v}")));
        }
        Ok(SampledFunction {
            grid,
            samples,
            evaluator: None,
        })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        grid.validate()?;
        let samples = grid.sample(&f);
        let mut out = SampledFunction::new(grid, samples)?;
        out.evaluator = Some(Arc::new(f));
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn scale(&self, s: f64) -> Self {
        SampledFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|v| s * v).collect(),
            evaluator: self.evaluator.clone().map(|f| -> Evaluator {
                Arc::new(move |x: &[f64]| s * f(x))
            }),
        }
    }

    /// Resamples on `grid`; needs the analytic evaluator.
    pub fn resample(&self, grid: GridSpec) -> Result<Self> {
        let f = self.evaluator.clone().ok_or_else(|| {
            Error::InvalidParameter("resampling needs an analytic evaluator".into())
        })?;
        grid.validate()?;
        let samples = grid.sample(|x| f(x));
        Ok(SampledFunction {
            grid,
            samples,
            evaluator: Some(f),
        })
    }

    /// Same function with twice the points per axis.
    pub fn refined(&self) -> Result<Self> {
        self.resample(self.grid.refined())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_{boundary} |f| / max |f|` (zero for `f = 0`).
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let edge = (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary(i))
            .fold(0.0, |m: f64, i| m.max(self.samples[i].abs()));
        edge / max
    }

    pub fn check_decay(&self) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > BOUNDARY_DECAY {
            Err(Error::BoundaryDecay { ratio })
        } else {
            Ok(())
        }
    }

    fn spectrum(&self) -> Vec<Complex64> {
        forward_transform(&self.grid, &self.samples)
    }
}

/// Both evaluations of `Σ_j ‖P_j f‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormRoutes {
    /// `Σ_j h^d Σ_x |(P_j f)(x)|²` with `P_j f = F⁻¹[p̂_j f̂]`.
    pub physical: f64,
    /// `Δy^d Σ_y |f̂(y)|² l̂(y)`.
    pub spectral: f64,
}

/// `Σ_j ‖P_j f‖²_{L₂}` by both routes, failing if they disagree by more than
/// [`ROUTE_TOL`] relative.
pub fn sobolev_seminorm_routes(vp: &VectorOperator, f: &SampledFunction) -> Result<SeminormRoutes> {
    let grid = f.grid();
    if vp.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            got: vp.dim(),
        });
    }
    f.check_decay()?;
    let fh = f.spectrum();
    let duals: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.dual_node(k)).collect();

    let mut physical = 0.0;
    for comp in vp.components() {
        let sym = symbol_of(comp);
        let pf: Vec<Complex64> = fh.iter().zip(&duals).map(|(v, y)| v * sym.eval(y)).collect();
        let back = inverse_transform(grid, &pf);
        physical += back.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume();
    }

    let sn = symbol_norm(vp);
    let spectral = fh
        .iter()
        .zip(&duals)
        .map(|(v, y)| v.norm_sqr() * sn.eval(y))
        .sum::<f64>()
        * grid.dual_cell_volume();

    let scale = physical.abs().max(spectral.abs());
    if (physical - spectral).abs() > ROUTE_TOL * scale {
        return Err(Error::RouteMismatch { physical, spectral });
    }
    Ok(SeminormRoutes { physical, spectral })
}

/// `‖f‖²_{H_P} = Σ_j ‖P_j f‖²_{L₂}`.
pub fn sobolev_seminorm(vp: &VectorOperator, f: &SampledFunction) -> Result<f64> {
    Ok(sobolev_seminorm_routes(vp, f)?.physical)
}

/// Result of [`native_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NativeNorm {
    /// `‖f‖²_{N_G}`
    pub value: f64,
    /// Share of the quadrature sum coming from the outermost dual nodes.
    pub boundary_fraction: f64,
}

/// Dual-boundary share above which [`NativeNorm::flagged`] is set.
pub const BOUNDARY_FRACTION_FLAG: f64 = 1e-6;

impl NativeNorm {
    /// The integrand has not decayed by the edge of the dual grid, so the
    /// value is likely truncated.
    pub fn flagged(&self) -> bool {
        self.boundary_fraction > BOUNDARY_FRACTION_FLAG
    }
}

/// `Ĝ` at the dual nodes of `grid`: stored spectral samples of a grid kernel
/// on the same grid, else the kernel's density evaluator.
fn density_on(kernel: &Kernel, grid: &GridSpec) -> Result<Vec<f64>> {
    if let Kernel::Grid { kernel: gk, .. } = kernel {
        if gk.grid() == grid {
            if let Some(s) = gk.spectral_samples() {
                return Ok(s.to_vec());
            }
        }
        if gk.symbol().is_none() {
            return Err(Error::NoSpectralDensity(
                "grid kernel was stored without its spectral density".into(),
            ));
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut y = vec![0.0; grid.dim];
    for k in 0..grid.len() {
        for (slot, i) in y.iter_mut().zip(grid.multi_index(k)) {
            *slot = grid.dual_coord(i);
        }
        let g = kernel
            .spectral_density(&y)
            .ok_or_else(|| Error::NoSpectralDensity(kernel.to_string()))?;
        out.push(g);
    }
    Ok(out)
}

/// `‖f‖²_{N_G} = (2π)^{−d/2} Δy^d Σ_y |f̂(y)|² / Ĝ(y)`.
pub fn native_norm(kernel: &Kernel, f: &SampledFunction) -> Result<NativeNorm> {
    let grid = f.grid();
    if kernel.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            got: kernel.dim(),
        });
    }
    f.check_decay()?;
    let density = density_on(kernel, grid)?;
    let fh = f.spectrum();
    let norm = (2.0 * PI).powf(-(grid.dim as f64) / 2.0) * grid.dual_cell_volume();
    let mut total = 0.0;
    let mut edge = 0.0;
    for (k, (v, g)) in fh.iter().zip(&density).enumerate() {
        let p = v.norm_sqr();
        let term = if p == 0.0 { 0.0 } else { p / g };
        total += term;
        if grid.is_boundary(k) {
            edge += term;
        }
    }
    if !total.is_finite() {
        return Err(Error::Grid(
            "native-norm quadrature overflowed; the dual grid reaches where Ĝ underflows".into(),
        ));
    }
    let boundary_fraction = if total > 0.0 { edge / total } else { 0.0 };
    Ok(NativeNorm {
        value: norm * total,
        boundary_fraction,
    })
}

/// Which kernel [`equivalence_check`] compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    Catalog(String),
    Synthesized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub seminorm: f64,
    pub native: f64,
    pub native_boundary_fraction: f64,
    /// `|seminorm − native| / native` (zero when both vanish).
    pub discrepancy: f64,
    pub kernel: KernelSource,
    pub tolerance: f64,
    pub pass: bool,
}

/// Default pass threshold for [`equivalence_check`].
pub const EQUIVALENCE_TOL: f64 = 1e-6;

/// Compares `‖f‖²_{H_P}` with `‖f‖²_{N_G}` for the Green function `G` of
/// `P*ᵀP`, taken from the catalog when the symbol is a Matérn symbol and
/// synthesized on `f`'s grid otherwise.
pub fn equivalence_check(vp: &VectorOperator, f: &SampledFunction) -> Result<EquivalenceReport> {
    equivalence_check_with(vp, f, EQUIVALENCE_TOL)
}

pub fn equivalence_check_with(
    vp: &VectorOperator,
    f: &SampledFunction,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    let sn = symbol_norm(vp);
    if let Verdict::Inadmissible(reason) = check_admissible(&sn).verdict {
        return Err(Error::Inadmissible(reason));
    }
    let (kernel, source) = match catalog_match(&sn) {
        Some(k) => {
            let name = k.to_string();
            (k, KernelSource::Catalog(name))
        }
        None => (
            Kernel::grid(synthesize_green(&sn, f.grid())?, None),
            KernelSource::Synthesized,
        ),
    };
    let seminorm = sobolev_seminorm(vp, f)?;
    let native = native_norm(&kernel, f)?;
    let discrepancy = relative_gap(seminorm, native.value);
    Ok(EquivalenceReport {
        seminorm,
        native: native.value,
        native_boundary_fraction: native.boundary_fraction,
        discrepancy,
        kernel: source,
        tolerance,
        pass: discrepancy <= tolerance,
    })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianLimitReport {
    pub sigma: f64,
    pub dim: usize,
    /// `a_n = ‖f‖²_{H_{P_n}}` for `n = 0..=n_max`.
    pub seminorms: Vec<f64>,
    /// `‖f‖²_{N_Φ}` for the Gaussian `Φ`.
    pub native: f64,
    /// `(native − a_n) / native`.
    pub gaps: Vec<f64>,
    /// `a_n` nondecreasing and bounded by `native`.
    pub monotone: bool,
    /// Largest relative disagreement between the scalar partial-sum form and
    /// explicit operators `P_n` for the orders that were materialized.
    pub operator_route_defect: f64,
    pub final_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Default pass threshold on the final gap of [`gaussian_limit_check`].
pub const GAUSSIAN_LIMIT_TOL: f64 = 1e-4;
/// Explicit operators `P_n` are cross-checked up to this order.
const OPERATOR_CROSSCHECK_MAX_N: u32 = 4;

/// `a_n = Δy^d Σ_y |f̂(y)|² Σ_{k≤n} t^k/k!`, `t = ‖y‖²/(4σ²)`, against the
/// native norm of the Gaussian kernel with the same `σ`.
pub fn gaussian_limit_check(
    sigma: f64,
    f: &SampledFunction,
    n_max: u32,
) -> Result<GaussianLimitReport> {
    gaussian_limit_check_with(sigma, f, n_max, GAUSSIAN_LIMIT_TOL)
}

pub fn gaussian_limit_check_with(
    sigma: f64,
    f: &SampledFunction,
    n_max: u32,
    tolerance: f64,
) -> Result<GaussianLimitReport> {
    let grid = *f.grid();
    let dim = grid.dim;
    let sched = truncation_schedule(ScheduleFamily::Gaussian, sigma, dim)?;
    let kernel = gaussian(sigma, dim)?;
    let native = native_norm(&kernel, f)?.value;

    let fh = f.spectrum();
    let weights: Vec<f64> = fh.iter().map(|v| v.norm_sqr()).collect();
    let duals: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.dual_node(k)).collect();
    let seminorms: Vec<f64> = (0..=n_max)
        .map(|n| {
            weights
                .iter()
                .zip(&duals)
                .map(|(w, y)| w * sched.symbol_norm_at(n, y))
                .sum::<f64>()
                * grid.dual_cell_volume()
        })
        .collect();

    let mut operator_route_defect: f64 = 0.0;
    if dim <= crate::kernels::GAUSSIAN_MATERIALIZE_MAX_DIM {
        for n in 0..=n_max.min(OPERATOR_CROSSCHECK_MAX_N) {
            let direct = sobolev_seminorm(&sched.operator(n)?, f)?;
            operator_route_defect =
                operator_route_defect.max(relative_gap(direct, seminorms[n as usize]));
        }
    }

    let gaps: Vec<f64> = seminorms
        .iter()
        .map(|a| if native > 0.0 { (native - a) / native } else { 0.0 })
        .collect();
    let bound = native * (1.0 + 1e-12);
    let monotone = seminorms.windows(2).all(|w| w[0] <= w[1]) && seminorms.iter().all(|&a| a <= bound);
    let final_gap = *gaps.last().expect("n_max + 1 entries");
    let pass = monotone && final_gap.abs() <= tolerance && operator_route_defect <= ROUTE_TOL;
    Ok(GaussianLimitReport {
        sigma,
        dim,
        seminorms,
        native,
        gaps,
        monotone,
        operator_route_defect,
        final_gap,
        tolerance,
        pass,
    })
}
