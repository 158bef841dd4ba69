//! Named numerical check suites with JSON reports
//! `{check, inputs, values, discrepancy, pass}`.
//!
//! Every suite takes an optional JSON config whose fields default to the
//! standard tolerances; randomized suites draw from a seeded ChaCha stream,
//! so identical inputs give byte-identical reports.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::interp::{assemble_gram, fit, min_eigenvalue, minimum_norm_certificate, DataSet};
use crate::kernels::{
    gaussian, matern, matern_operator, sobolev_spline_1d, truncation_schedule, Family, Kernel,
    KernelSpec, ScheduleFamily, GAUSSIAN_MATERIALIZE_MAX_DIM, GAUSSIAN_MATERIALIZE_MAX_N,
};
use crate::norms::{
    equivalence_check_with, gaussian_limit_check_with, SampledFunction, EQUIVALENCE_TOL,
    GAUSSIAN_LIMIT_TOL,
};
use crate::opcalc::{DiffOperator, VectorOperator};
use crate::quad::integrate;
use crate::special::bessel_k;
use crate::spectral::{default_grid, inverse_density, symbol_norm, synthesize_green};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckName {
    Pd,
    Equivalence,
    GaussianLimit,
    MinNorm,
    CatalogConsistency,
}

impl CheckName {
    pub const ALL: [CheckName; 5] = [
        CheckName::Pd,
        CheckName::Equivalence,
        CheckName::GaussianLimit,
        CheckName::MinNorm,
        CheckName::CatalogConsistency,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Pd => "pd",
            CheckName::Equivalence => "equivalence",
            CheckName::GaussianLimit => "gaussian-limit",
            CheckName::MinNorm => "min-norm",
            CheckName::CatalogConsistency => "catalog-consistency",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "check",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: Value,
    pub values: Value,
    pub discrepancy: f64,
    pub pass: bool,
}

/// Runs `check` with `config` (defaults when `None`); `seed` overrides the
/// config's seed.
pub fn run_check(check: CheckName, config: Option<&Value>, seed: Option<u64>) -> Result<CheckReport> {
    match check {
        CheckName::Pd => pd_check(&with_seed(parse_config::<PdConfig>(config)?, seed)),
        CheckName::Equivalence => equivalence_suite(&parse_config::<EquivalenceConfig>(config)?),
        CheckName::GaussianLimit => {
            gaussian_limit_suite(&with_seed(parse_config::<GaussianLimitConfig>(config)?, seed))
        }
        CheckName::MinNorm => min_norm_suite(&with_seed(parse_config::<MinNormConfig>(config)?, seed)),
        CheckName::CatalogConsistency => {
            catalog_suite(&with_seed(parse_config::<CatalogConfig>(config)?, seed))
        }
    }
}

fn parse_config<C: DeserializeOwned + Default>(config: Option<&Value>) -> Result<C> {
    match config {
        None => Ok(C::default()),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| Error::Malformed(format!("check config: {e}"))),
    }
}

trait Seeded {
    fn seed_mut(&mut self) -> &mut u64;
}

fn with_seed<C: Seeded>(mut config: C, seed: Option<u64>) -> C {
    if let Some(s) = seed {
        *config.seed_mut() = s;
    }
    config
}

fn report<C: Serialize>(check: CheckName, inputs: &C, values: Value, discrepancy: f64, pass: bool) -> Result<CheckReport> {
    Ok(CheckReport {
        check: check.as_str().to_string(),
        inputs: serde_json::to_value(inputs)?,
        values,
        discrepancy,
        pass,
    })
}

/// Samples `count` points in `[0, side]^dim` with pairwise distance at least
/// `separation`, by rejection.
pub fn separated_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    dim: usize,
    side: f64,
    separation: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while pts.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidParameter(format!(
                "cannot place {count} points {separation} apart in [0, {side}]^{dim}"
            )));
        }
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..side)).collect();
        let ok = pts.iter().all(|q| {
            q.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= separation * separation
        });
        if ok {
            pts.push(p);
        }
    }
    Ok(pts)
}

fn default_catalog() -> Vec<KernelSpec> {
    let spec = |family, sigma, n, dim| KernelSpec {
        family,
        sigma: Some(sigma),
        n,
        dim: Some(dim),
        file: None,
    };
    vec![
        spec(Family::SobolevSpline1d, 1.0, None, 1),
        spec(Family::Matern, 1.0, Some(1), 1),
        spec(Family::Matern, 1.0, Some(2), 1),
        spec(Family::Matern, 1.0, Some(2), 2),
        spec(Family::Matern, 1.0, Some(3), 2),
        spec(Family::Matern, 1.0, Some(2), 3),
        spec(Family::Gaussian, 1.0, None, 1),
        spec(Family::Gaussian, 1.0, None, 2),
        spec(Family::Gaussian, 1.0, None, 3),
    ]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdConfig {
    pub seed: u64,
    pub sets: usize,
    pub min_points: usize,
    pub max_points: usize,
    /// Minimum separation of the random sites, in units of `1/σ`.
    pub separation: f64,
    pub kernels: Vec<KernelSpec>,
}

impl Default for PdConfig {
    fn default() -> Self {
        PdConfig {
            seed: DEFAULT_SEED,
            sets: 30,
            min_points: 2,
            max_points: 60,
            separation: 0.5,
            kernels: default_catalog(),
        }
    }
}

impl Seeded for PdConfig {
    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

/// Smallest Gram eigenvalue over random separated point sets, per kernel.
pub fn pd_check(config: &PdConfig) -> Result<CheckReport> {
    if config.min_points == 0 || config.min_points > config.max_points {
        return Err(Error::InvalidParameter("need 1 <= min_points <= max_points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    let mut worst = f64::INFINITY;
    for spec in &config.kernels {
        let kernel = spec.build()?;
        let dim = kernel.dim();
        let sep = config.separation / spec.sigma.unwrap_or(1.0);
        let mut min_eig = f64::INFINITY;
        let mut min_rel = f64::INFINITY;
        for _ in 0..config.sets {
            let n = rng.random_range(config.min_points..=config.max_points);
            let side = sep * (4.0 * n as f64).powf(1.0 / dim as f64) + sep;
            let pts = separated_points(&mut rng, n, dim, side, sep)?;
            let a = assemble_gram(&kernel, &pts)?;
            let lam = min_eigenvalue(&a);
            min_eig = min_eig.min(lam);
            min_rel = min_rel.min(lam / kernel.value_at_origin());
        }
        worst = worst.min(min_eig);
        rows.push(json!({
            "kernel": kernel.to_string(),
            "min_eigenvalue": min_eig,
            "min_eigenvalue_over_g0": min_rel,
            "pass": min_eig > 0.0,
        }));
    }
    let pass = worst > 0.0;
    report(
        CheckName::Pd,
        config,
        json!({ "kernels": rows, "min_eigenvalue": worst }),
        if pass { 0.0 } else { -worst },
        pass,
    )
}

/// Analytic test functions used by the norm suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `exp(−a‖x‖²)`
    Gaussian { a: f64 },
    /// `x₁ exp(−a‖x‖²)`
    OddGaussian { a: f64 },
    /// `cos(ω x₁) exp(−a‖x‖²)`
    CosBump { a: f64, omega: f64 },
}

impl Default for TestFunction {
    fn default() -> Self {
        TestFunction::Gaussian { a: 1.0 }
    }
}

impl TestFunction {
    pub fn sample(&self, grid: GridSpec) -> Result<SampledFunction> {
        let r2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        match *self {
            TestFunction::Gaussian { a } => SampledFunction::from_fn(grid, move |x| (-a * r2(x)).exp()),
            TestFunction::OddGaussian { a } => {
                SampledFunction::from_fn(grid, move |x| x[0] * (-a * r2(x)).exp())
            }
            TestFunction::CosBump { a, omega } => {
                SampledFunction::from_fn(grid, move |x| (omega * x[0]).cos() * (-a * r2(x)).exp())
            }
        }
    }
}

/// Grid for the analytic test functions: `R = 8`, with 256, 64 or 32
/// points per axis in 1, 2 or 3 dimensions.
pub fn test_function_grid(dim: usize) -> Result<GridSpec> {
    let points = match dim {
        1 => 256,
        2 => 64,
        3 => 32,
        _ => return Err(Error::Grid(format!("test grids exist for d <= 3, got {dim}"))),
    };
    GridSpec::new(dim, 8.0, points)
}

/// `P = (d/dx, I)ᵀ` on `ℝ`, whose Green function is `e^{−|x|}/2`.
pub fn spline_operator() -> VectorOperator {
    VectorOperator::new(vec![DiffOperator::partial(1, 0), DiffOperator::identity(1)])
        .expect("non-empty")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceConfig {
    pub operator: VectorOperator,
    pub function: TestFunction,
    pub grid: Option<GridSpec>,
    pub tolerance: f64,
    /// Also run on the refined grid and require the discrepancy to halve.
    pub refine: bool,
    /// Discrepancies below this are at roundoff and exempt from halving.
    pub floor: f64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            operator: spline_operator(),
            function: TestFunction::default(),
            grid: None,
            tolerance: EQUIVALENCE_TOL,
            refine: true,
            floor: 1e-10,
        }
    }
}

/// `d_fine ≤ d_coarse / 2`, or both already at the roundoff floor.
pub fn halves_or_floor(coarse: f64, fine: f64, floor: f64) -> bool {
    fine <= 0.5 * coarse || fine.max(coarse) <= floor
}

pub fn equivalence_suite(config: &EquivalenceConfig) -> Result<CheckReport> {
    let dim = config.operator.dim();
    let grid = match config.grid {
        Some(g) => g,
        None => test_function_grid(dim)?,
    };
    let f = config.function.sample(grid)?;
    let coarse = equivalence_check_with(&config.operator, &f, config.tolerance)?;
    let mut values = json!({
        "grid": grid,
        "seminorm": coarse.seminorm,
        "native": coarse.native,
        "native_boundary_fraction": coarse.native_boundary_fraction,
        "kernel": coarse.kernel,
    });
    let mut pass = coarse.pass;
    if config.refine {
        let fine = equivalence_check_with(&config.operator, &f.refined()?, config.tolerance)?;
        let halves = halves_or_floor(coarse.discrepancy, fine.discrepancy, config.floor);
        values["refined"] = json!({
            "grid": grid.refined(),
            "discrepancy": fine.discrepancy,
            "halves_or_floor": halves,
        });
        pass &= fine.pass && halves;
    }
    values["discrepancy"] = json!(coarse.discrepancy);
    report(CheckName::Equivalence, config, values, coarse.discrepancy, pass)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianLimitConfig {
    pub seed: u64,
    pub sigma: f64,
    pub dims: Vec<usize>,
    pub n_max: u32,
    /// Random points at which symbol-norm monotonicity is checked.
    pub samples: usize,
    pub tolerance: f64,
    /// Grid of the test function `exp(−‖x‖²)`; the dual grid must stop
    /// before `e^{‖y‖²/(4σ²)}` amplifies roundoff in `f̂`.
    pub extent: f64,
    pub points: usize,
}

impl Default for GaussianLimitConfig {
    fn default() -> Self {
        GaussianLimitConfig {
            seed: DEFAULT_SEED,
            sigma: 1.0,
            dims: vec![1, 2],
            n_max: 30,
            samples: 100,
            tolerance: GAUSSIAN_LIMIT_TOL,
            extent: 10.0,
            points: 64,
        }
    }
}

impl Seeded for GaussianLimitConfig {
    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

pub fn gaussian_limit_suite(config: &GaussianLimitConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    let mut pass = true;
    let mut discrepancy: f64 = 0.0;
    for &dim in &config.dims {
        let sched = truncation_schedule(ScheduleFamily::Gaussian, config.sigma, dim)?;
        let reach = 5.0 * config.sigma;
        let ys: Vec<Vec<f64>> = (0..config.samples)
            .map(|_| (0..dim).map(|_| rng.random_range(-reach..reach)).collect())
            .collect();
        let mut symbols_monotone = true;
        for y in &ys {
            let limit = sched.limit_at(y).expect("gaussian family");
            let mut prev = 0.0;
            for n in 0..=config.n_max {
                let v = sched.symbol_norm_at(n, y);
                symbols_monotone &= v >= prev && v <= limit * (1.0 + 1e-15);
                prev = v;
            }
        }
        // The scalar partial sums equal the explicit operators' symbol norms.
        let mut operator_defect: f64 = 0.0;
        if dim <= GAUSSIAN_MATERIALIZE_MAX_DIM {
            for n in 0..=config.n_max.min(GAUSSIAN_MATERIALIZE_MAX_N) {
                let sn = symbol_norm(&sched.operator(n)?);
                for y in &ys {
                    let (a, b) = (sn.eval(y), sched.symbol_norm_at(n, y));
                    operator_defect = operator_defect.max((a - b).abs() / b);
                }
            }
        }
        let grid = GridSpec::new(dim, config.extent, config.points)?;
        let f = TestFunction::Gaussian { a: 1.0 }.sample(grid)?;
        let limit = gaussian_limit_check_with(config.sigma, &f, config.n_max, config.tolerance)?;
        let ok = symbols_monotone && operator_defect <= 1e-12 && limit.pass;
        pass &= ok;
        discrepancy = discrepancy.max(limit.final_gap.abs());
        rows.push(json!({
            "dim": dim,
            "symbol_norms_monotone": symbols_monotone,
            "operator_symbol_defect": operator_defect,
            "seminorms": limit.seminorms,
            "native": limit.native,
            "gaps": limit.gaps,
            "seminorms_monotone": limit.monotone,
            "operator_route_defect": limit.operator_route_defect,
            "final_gap": limit.final_gap,
            "pass": ok,
        }));
    }
    report(CheckName::GaussianLimit, config, json!({ "dims": rows }), discrepancy, pass)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinNormConfig {
    pub seed: u64,
    pub trials: usize,
    pub points: usize,
    pub kernels: Vec<KernelSpec>,
}

impl Default for MinNormConfig {
    fn default() -> Self {
        let spline = KernelSpec {
            family: Family::SobolevSpline1d,
            sigma: Some(1.0),
            n: None,
            dim: Some(1),
            file: None,
        };
        let matern2 = KernelSpec {
            family: Family::Matern,
            sigma: Some(1.0),
            n: Some(2),
            dim: Some(2),
            file: None,
        };
        MinNormConfig {
            seed: DEFAULT_SEED,
            trials: 50,
            points: 8,
            kernels: vec![spline, matern2],
        }
    }
}

impl Seeded for MinNormConfig {
    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

pub fn min_norm_suite(config: &MinNormConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    let mut pass = true;
    let mut worst_cross: f64 = 0.0;
    for spec in &config.kernels {
        let kernel = spec.build()?;
        let dim = kernel.dim();
        let pts = separated_points(&mut rng, config.points, dim, 1.0, 0.05)?;
        let ys = pts
            .iter()
            .map(|p| (2.0 * PI * p[0]).sin() + p.iter().skip(1).map(|v| (PI * v).cos()).sum::<f64>())
            .collect();
        let s = fit(&kernel, &DataSet::new(pts, ys)?)?;
        let cert = minimum_norm_certificate(&s, config.trials, rng.random())?;
        pass &= cert.pass;
        worst_cross = worst_cross.max(cert.max_cross_term);
        rows.push(json!({ "kernel": kernel.to_string(), "certificate": cert }));
    }
    report(CheckName::MinNorm, config, json!({ "kernels": rows }), worst_cross, pass)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaternCase {
    pub sigma: f64,
    pub n: u32,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCase {
    pub sigma: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogConfig {
    pub seed: u64,
    /// Test points per kernel for the transform comparison.
    pub points: usize,
    /// Maximum `|G_grid − G| / G(0)`.
    pub tolerance: f64,
    pub reduction_points: usize,
    pub reduction_tolerance: f64,
    pub bessel_tolerance: f64,
    pub matern: Vec<MaternCase>,
    pub gaussian: Vec<GaussianCase>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        let m = |sigma, n, dim| MaternCase { sigma, n, dim };
        let g = |sigma, dim| GaussianCase { sigma, dim };
        CatalogConfig {
            seed: DEFAULT_SEED,
            points: 20,
            tolerance: 1e-3,
            reduction_points: 50,
            reduction_tolerance: 1e-10,
            bessel_tolerance: 1e-10,
            matern: vec![m(1.0, 1, 1), m(0.5, 2, 1), m(1.0, 2, 2), m(1.5, 3, 2), m(1.0, 2, 3)],
            gaussian: vec![g(1.0, 1), g(2.0, 2), g(1.0, 3)],
        }
    }
}

impl Seeded for CatalogConfig {
    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

/// `K_ν(z) = ∫₀^∞ exp(−z cosh t) cosh(νt) dt` by adaptive quadrature, split
/// at the integrand's peak `sinh t* = ν/z`.
pub fn bessel_k_quadrature(nu: f64, z: f64) -> f64 {
    let nu = nu.abs();
    let peak = (nu / z).asinh();
    let log_f = |t: f64| -z * t.cosh() + nu * t;
    let top = log_f(peak);
    let mut end = peak + 1.0;
    while log_f(end) > top - 60.0 {
        end += 1.0;
    }
    // Scale out the peak value so the quadrature sees O(1) numbers.
    let f = |t: f64| (-z * t.cosh() - top).exp() * (nu * t).cosh();
    let body = if peak > 0.0 { integrate(f, 0.0, peak, 1e-14) } else { 0.0 };
    (body + integrate(f, peak, end, 1e-14)) * top.exp()
}

/// The `(ν, z)` lattice of the Bessel check: 10 orders in `[0, 10]` times 20
/// log-spaced arguments in `[1e−6, 50]`.
pub fn bessel_lattice() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(200);
    for i in 0..10 {
        let nu = 10.0 * i as f64 / 9.0;
        for j in 0..20 {
            let z = 1e-6 * (50.0f64 / 1e-6).powf(j as f64 / 19.0);
            out.push((nu, z));
        }
    }
    out
}

fn random_points(rng: &mut ChaCha8Rng, count: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-radius..radius)).collect())
        .collect()
}

fn max_rel_error(a: &Kernel, b: &dyn Fn(&[f64]) -> f64, pts: &[Vec<f64>]) -> f64 {
    let g0 = a.value_at_origin();
    pts.iter()
        .map(|x| (a.eval(x) - b(x)).abs() / g0)
        .fold(0.0, f64::max)
}

pub fn catalog_suite(config: &CatalogConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pass = true;
    let mut discrepancy: f64 = 0.0;

    // Matérn with n = 1 in d = 1 is the Sobolev spline.
    let spline = sobolev_spline_1d(1.0)?;
    let m11 = matern(1.0, 1, 1)?;
    let reduction = (0..config.reduction_points)
        .map(|i| {
            let x = [-5.0 + 10.0 * i as f64 / (config.reduction_points.max(2) - 1) as f64];
            (m11.eval(&x) - spline.eval(&x)).abs() / spline.eval(&x)
        })
        .fold(0.0, f64::max);
    pass &= reduction <= config.reduction_tolerance;

    let mut matern_rows = Vec::new();
    for case in &config.matern {
        let kernel = matern(case.sigma, case.n, case.dim)?;
        let sn = symbol_norm(&matern_operator(case.sigma, case.n, case.dim)?);
        let grid = default_grid(&sn)?;
        let gk = synthesize_green(&sn, &grid)?;
        let pts = random_points(&mut rng, config.points, case.dim, 3.0 / case.sigma);
        let err = max_rel_error(&kernel, &|x| gk.eval(x), &pts);
        let ok = err <= config.tolerance;
        pass &= ok;
        discrepancy = discrepancy.max(err);
        matern_rows.push(json!({
            "kernel": kernel.to_string(),
            "grid": grid,
            "max_error_over_g0": err,
            "pass": ok,
        }));
    }

    let mut gaussian_rows = Vec::new();
    for case in &config.gaussian {
        let kernel = gaussian(case.sigma, case.dim)?;
        let points = if case.dim <= 2 { 128 } else { 64 };
        let grid = GridSpec::new(case.dim, 6.0 / case.sigma, points)?;
        let k = kernel.clone();
        let gk = inverse_density(&grid, move |y| k.spectral_density(y).expect("catalog kernel"))?;
        let pts = random_points(&mut rng, config.points, case.dim, 2.0 / case.sigma);
        let err = max_rel_error(&kernel, &|x| gk.eval(x), &pts);
        let ok = err <= config.tolerance;
        pass &= ok;
        discrepancy = discrepancy.max(err);
        gaussian_rows.push(json!({
            "kernel": kernel.to_string(),
            "grid": grid,
            "max_error_over_g0": err,
            "pass": ok,
        }));
    }

    let mut bessel_err: f64 = 0.0;
    for (nu, z) in bessel_lattice() {
        let oracle = bessel_k_quadrature(nu, z);
        bessel_err = bessel_err.max((bessel_k(nu, z)? - oracle).abs() / oracle);
    }
    pass &= bessel_err <= config.bessel_tolerance;

    report(
        CheckName::CatalogConsistency,
        config,
        json!({
            "matern_spline_reduction": reduction,
            "matern": matern_rows,
            "gaussian": gaussian_rows,
            "bessel_max_relative_error": bessel_err,
        }),
        discrepancy,
        pass,
    )
}
