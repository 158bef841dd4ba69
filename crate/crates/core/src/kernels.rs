//! Closed-form kernel catalog (Sobolev spline, Matérn, Gaussian), grid
//! kernels, and truncation schedules of the operator families that generate
//! them.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcalc::{DiffOperator, VectorOperator};
use crate::special::{bessel_k, gamma_half};
use crate::spectral::{GridKernel, SymbolNorm};

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("dimension must be >= 1".into()))
    }
}

/// `G(x) = exp(−σ|x|)/(2σ)` on `ℝ`, Green function of `σ²I − d²/dx²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevSpline {
    sigma: f64,
}

impl SobolevSpline {
    pub fn eval(&self, x: &[f64]) -> f64 {
        (-self.sigma * x[0].abs()).exp() / (2.0 * self.sigma)
    }

    pub fn spectral_density(&self, y: &[f64]) -> f64 {
        (2.0 * PI).powf(-0.5) / (self.sigma * self.sigma + y[0] * y[0])
    }
}

/// Matérn / Sobolev spline of order `n` in `d` dimensions, Green function
/// of `(σ²I − Δ)^n`:
///
/// `G(x) = 2^{1−n−d/2} / (π^{d/2} Γ(n) σ^{2n−d}) · (σ‖x‖)^{n−d/2} K_{d/2−n}(σ‖x‖)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matern {
    sigma: f64,
    n: u32,
    dim: usize,
    scale: f64,
    origin: f64,
}

impl Matern {
    fn new(sigma: f64, n: u32, dim: usize) -> Result<Self> {
        check_sigma(sigma)?;
        check_dim(dim)?;
        if 2 * n as usize <= dim {
            return Err(Error::InvalidParameter(format!(
                "Matérn order requires n > d/2, got n={n}, d={dim}"
            )));
        }
        let d = dim as f64;
        let nf = n as f64;
        let denom = PI.powf(d / 2.0) * gamma_half(2 * n) * sigma.powf(2.0 * nf - d);
        let scale = 2f64.powf(1.0 - nf - d / 2.0) / denom;
        // z^{ν}K_ν(z) → 2^{ν−1}Γ(ν) as z → 0, with ν = n − d/2 > 0.
        let origin = 2f64.powf(-d) * gamma_half(2 * n - dim as u32) / denom;
        Ok(Matern {
            sigma,
            n,
            dim,
            scale,
            origin,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let z = self.sigma * norm2(x).sqrt();
        if z < 1e-20 {
            return self.origin;
        }
        let nu = self.n as f64 - self.dim as f64 / 2.0;
        self.scale * z.powf(nu) * bessel_k(nu, z).expect("z > 0")
    }

    pub fn spectral_density(&self, y: &[f64]) -> f64 {
        (2.0 * PI).powf(-(self.dim as f64) / 2.0)
            * (self.sigma * self.sigma + norm2(y)).powi(-(self.n as i32))
    }
}

/// `Φ(x) = σ^d π^{−d/2} exp(−σ²‖x‖²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    sigma: f64,
    dim: usize,
}

impl Gaussian {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim as i32;
        self.sigma.powi(d) * PI.powf(-(d as f64) / 2.0) * (-self.sigma * self.sigma * norm2(x)).exp()
    }

    pub fn spectral_density(&self, y: &[f64]) -> f64 {
        (2.0 * PI).powf(-(self.dim as f64) / 2.0)
            * (-norm2(y) / (4.0 * self.sigma * self.sigma)).exp()
    }
}

/// An even, positive definite function `G: ℝ^d → ℝ`, used through
/// `K(x, y) = G(x − y)`.
#[derive(Clone, Debug)]
pub enum Kernel {
    SobolevSpline(SobolevSpline),
    Matern(Matern),
    Gaussian(Gaussian),
    Grid {
        kernel: Arc<GridKernel>,
        file: Option<PathBuf>,
    },
}

pub fn sobolev_spline_1d(sigma: f64) -> Result<Kernel> {
    check_sigma(sigma)?;
    Ok(Kernel::SobolevSpline(SobolevSpline { sigma }))
}

pub fn matern(sigma: f64, n: u32, dim: usize) -> Result<Kernel> {
    Ok(Kernel::Matern(Matern::new(sigma, n, dim)?))
}

pub fn gaussian(sigma: f64, dim: usize) -> Result<Kernel> {
    check_sigma(sigma)?;
    check_dim(dim)?;
    Ok(Kernel::Gaussian(Gaussian { sigma, dim }))
}

impl Kernel {
    pub fn grid(kernel: GridKernel, file: Option<PathBuf>) -> Self {
        Kernel::Grid {
            kernel: Arc::new(kernel),
            file,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Kernel::SobolevSpline(_) => 1,
            Kernel::Matern(k) => k.dim,
            Kernel::Gaussian(k) => k.dim,
            Kernel::Grid { kernel, .. } => kernel.dim(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Kernel::SobolevSpline(_) => Family::SobolevSpline1d,
            Kernel::Matern(_) => Family::Matern,
            Kernel::Gaussian(_) => Family::Gaussian,
            Kernel::Grid { .. } => Family::Grid,
        }
    }

    /// `G(x)`; `x` must have length [`Kernel::dim`].
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            Kernel::SobolevSpline(k) => k.eval(x),
            Kernel::Matern(k) => k.eval(x),
            Kernel::Gaussian(k) => k.eval(x),
            Kernel::Grid { kernel, .. } => kernel.eval(x),
        }
    }

    pub fn eval_checked(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    /// `Ĝ(y)`, when the kernel carries its spectral density.
    pub fn spectral_density(&self, y: &[f64]) -> Option<f64> {
        match self {
            Kernel::SobolevSpline(k) => Some(k.spectral_density(y)),
            Kernel::Matern(k) => Some(k.spectral_density(y)),
            Kernel::Gaussian(k) => Some(k.spectral_density(y)),
            Kernel::Grid { kernel, .. } => kernel.spectral_density(y),
        }
    }

    pub fn value_at_origin(&self) -> f64 {
        match self {
            Kernel::Grid { kernel, .. } => kernel.value_at_origin(),
            _ => self.eval(&vec![0.0; self.dim()]),
        }
    }

    pub fn spec(&self) -> KernelSpec {
        let base = KernelSpec {
            family: self.family(),
            sigma: None,
            n: None,
            dim: Some(self.dim()),
            file: None,
        };
        match self {
            Kernel::SobolevSpline(k) => KernelSpec {
                sigma: Some(k.sigma),
                ..base
            },
            Kernel::Matern(k) => KernelSpec {
                sigma: Some(k.sigma),
                n: Some(k.n),
                ..base
            },
            Kernel::Gaussian(k) => KernelSpec {
                sigma: Some(k.sigma),
                ..base
            },
            Kernel::Grid { file, .. } => KernelSpec {
                file: file.clone(),
                ..base
            },
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::SobolevSpline(k) => write!(f, "sobolev_spline_1d(σ={})", k.sigma),
            Kernel::Matern(k) => write!(f, "matern(σ={}, n={}, d={})", k.sigma, k.n, k.dim),
            Kernel::Gaussian(k) => write!(f, "gaussian(σ={}, d={})", k.sigma, k.dim),
            Kernel::Grid { kernel, .. } => {
                let g = kernel.grid();
                write!(f, "grid(d={}, R={}, M={})", g.dim, g.extent, g.points)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Matern,
    Gaussian,
    #[serde(rename = "sobolev_spline_1d")]
    SobolevSpline1d,
    Grid,
}

/// Kernel description used in configs and model files:
/// `{"family": ..., "sigma": s, "n": n, "dim": d, "file": path}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        let sigma = || {
            self.sigma
                .ok_or_else(|| Error::InvalidParameter("kernel spec needs `sigma`".into()))
        };
        let dim = || {
            self.dim
                .ok_or_else(|| Error::InvalidParameter("kernel spec needs `dim`".into()))
        };
        let kernel = match self.family {
            Family::SobolevSpline1d => {
                if let Some(d) = self.dim {
                    if d != 1 {
                        return Err(Error::InvalidParameter(format!(
                            "sobolev_spline_1d is one-dimensional, got dim={d}"
                        )));
                    }
                }
                sobolev_spline_1d(sigma()?)?
            }
            Family::Matern => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidParameter("matern spec needs `n`".into()))?;
                matern(sigma()?, n, dim()?)?
            }
            Family::Gaussian => gaussian(sigma()?, dim()?)?,
            Family::Grid => {
                let file = self.file.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("grid kernel spec needs `file`".into())
                })?;
                let kernel = GridKernel::load(file)?;
                if let Some(d) = self.dim {
                    if d != kernel.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: kernel.dim(),
                        });
                    }
                }
                Kernel::grid(kernel, Some(file.clone()))
            }
        };
        Ok(kernel)
    }
}

/// Returns the catalog kernel whose spectral density is `(2π)^{−d/2} l̂⁻¹`,
/// if `l̂` is a Matérn symbol `(σ² + ‖y‖²)^n` with `n > d/2`.
pub fn catalog_match(sn: &SymbolNorm) -> Option<Kernel> {
    let dim = sn.dim();
    let degree = sn.degree();
    if degree == 0 || degree % 2 != 0 {
        return None;
    }
    let n = degree / 2;
    if 2 * n as usize <= dim {
        return None;
    }
    let l0 = sn.at_origin();
    if !(l0 > 0.0) {
        return None;
    }
    let sigma = l0.powf(1.0 / (2 * n) as f64);
    let candidate = crate::spectral::symbol_norm(&matern_operator(sigma, n, dim).ok()?);
    if candidate.approx_eq(sn, 1e-10) {
        matern(sigma, n, dim).ok()
    } else {
        None
    }
}

/// Operator families whose truncations `P_n = (Q₀ᵀ, …, Q_nᵀ)ᵀ` generate
/// the Matérn and Gaussian kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleFamily {
    Matern,
    Gaussian,
}

impl std::str::FromStr for ScheduleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matern" => Ok(ScheduleFamily::Matern),
            "gaussian" => Ok(ScheduleFamily::Gaussian),
            other => Err(Error::Unknown {
                kind: "operator family",
                name: other.to_string(),
            }),
        }
    }
}

/// `Q_j = w_j Δ^k` for `j = 2k`, `Q_j = w_j Δ^k ∇` for `j = 2k + 1`.
fn q_block(dim: usize, j: u32, weight: f64) -> VectorOperator {
    let lap_pow = DiffOperator::laplacian(dim).power(j / 2);
    let block = if j % 2 == 0 {
        VectorOperator::new(vec![lap_pow]).expect("non-empty")
    } else {
        VectorOperator::gradient(dim)
            .precompose(&lap_pow)
            .expect("same dimension")
    };
    block.scale(weight)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `P = (Q₀ᵀ, …, Q_nᵀ)ᵀ` with `Q_j` weights `(n! σ^{2n−2j} / (j!(n−j)!))^{1/2}`,
/// so that `P*ᵀP = (σ²I − Δ)^n`.
pub fn matern_operator(sigma: f64, n: u32, dim: usize) -> Result<VectorOperator> {
    check_sigma(sigma)?;
    check_dim(dim)?;
    if n == 0 {
        return Err(Error::InvalidParameter("matern operator needs n >= 1".into()));
    }
    let blocks = (0..=n).map(|j| {
        let w = factorial(n) * sigma.powi(2 * (n - j) as i32) / (factorial(j) * factorial(n - j));
        q_block(dim, j, w.sqrt())
    });
    concat_blocks(blocks)
}

/// `P_n = (Q₀ᵀ, …, Q_nᵀ)ᵀ` with `Q_j` weights `(1/(j! 4^j σ^{2j}))^{1/2}`.
pub fn gaussian_operator(sigma: f64, n: u32, dim: usize) -> Result<VectorOperator> {
    check_sigma(sigma)?;
    check_dim(dim)?;
    let blocks = (0..=n).map(|j| {
        let w = 1.0 / (factorial(j) * 4f64.powi(j as i32) * sigma.powi(2 * j as i32));
        q_block(dim, j, w.sqrt())
    });
    concat_blocks(blocks)
}

fn concat_blocks(mut blocks: impl Iterator<Item = VectorOperator>) -> Result<VectorOperator> {
    let first = blocks.next().ok_or(Error::EmptyOperator)?;
    blocks.try_fold(first, |acc, b| acc.concat(&b))
}

/// Largest truncation order materialized as an explicit Gaussian operator.
pub const GAUSSIAN_MATERIALIZE_MAX_N: u32 = 12;
/// Largest dimension in which Gaussian truncations are materialized.
pub const GAUSSIAN_MATERIALIZE_MAX_DIM: usize = 2;

/// Generator of the truncated vector operators `P_n`, `n = 1, 2, …`.
///
/// For the Gaussian family `‖p̂_{P_n}(y)‖² = Σ_{k≤n} t^k/k!` with
/// `t = ‖y‖²/(4σ²)`, increasing to `(2π)^{−d/2} φ̂(y)^{−1} = e^t`. For the
/// Matérn family `P_n` is the order-`n` Matérn operator with symbol norm
/// `(σ² + ‖y‖²)^n`, which is nondecreasing in `n` only where
/// `σ² + ‖y‖² ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationSchedule {
    family: ScheduleFamily,
    sigma: f64,
    dim: usize,
}

pub fn truncation_schedule(
    family: ScheduleFamily,
    sigma: f64,
    dim: usize,
) -> Result<TruncationSchedule> {
    check_sigma(sigma)?;
    check_dim(dim)?;
    Ok(TruncationSchedule { family, sigma, dim })
}

impl TruncationSchedule {
    pub fn family(&self) -> ScheduleFamily {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The explicit operator `P_n`.
    pub fn operator(&self, n: u32) -> Result<VectorOperator> {
        match self.family {
            ScheduleFamily::Matern => matern_operator(self.sigma, n, self.dim),
            ScheduleFamily::Gaussian => {
                if n > GAUSSIAN_MATERIALIZE_MAX_N || self.dim > GAUSSIAN_MATERIALIZE_MAX_DIM {
                    return Err(Error::InvalidParameter(format!(
                        "Gaussian truncations are materialized only for n <= {GAUSSIAN_MATERIALIZE_MAX_N}, \
                         d <= {GAUSSIAN_MATERIALIZE_MAX_DIM} (got n={n}, d={}); use symbol_norm_at",
                        self.dim
                    )));
                }
                gaussian_operator(self.sigma, n, self.dim)
            }
        }
    }

    /// `‖p̂_{P_n}(y)‖²` by the scalar formula.
    pub fn symbol_norm_at(&self, n: u32, y: &[f64]) -> f64 {
        let r2 = norm2(y);
        match self.family {
            ScheduleFamily::Matern => (self.sigma * self.sigma + r2).powi(n as i32),
            ScheduleFamily::Gaussian => {
                let t = r2 / (4.0 * self.sigma * self.sigma);
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..=n {
                    term *= t / k as f64;
                    sum += term;
                }
                sum
            }
        }
    }

    /// `lim_n ‖p̂_{P_n}(y)‖² = (2π)^{−d/2} φ̂(y)^{−1}` for the Gaussian family.
    pub fn limit_at(&self, y: &[f64]) -> Option<f64> {
        match self.family {
            ScheduleFamily::Gaussian => Some((norm2(y) / (4.0 * self.sigma * self.sigma)).exp()),
            ScheduleFamily::Matern => None,
        }
    }
}
