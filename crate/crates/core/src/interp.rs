//! Scattered-data interpolation `s(x) = Σ c_j G(x − x_j)` with `Ac = Y`,
//! `A = (G(x_j − x_k))`, and a certificate of its minimum-norm property.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelSpec};

/// Sites closer than this (Euclidean, in the data's own units) are duplicates.
pub const DUPLICATE_SEPARATION: f64 = 1e-12;
/// Gram matrices with a larger condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e13;

/// Data sites `X ⊂ ℝ^d` with values `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    dim: usize,
    min_separation: f64,
}

impl DataSet {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Malformed("data set needs at least one site".into()));
        }
        if points.len() != values.len() {
            return Err(Error::Malformed(format!(
                "{} sites but {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::Malformed("sites must have at least one coordinate".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("site {i} has a non-finite coordinate")));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("value {i} is not finite")));
        }
        let min_separation = check_distinct(&points)?;
        Ok(DataSet {
            points,
            values,
            dim,
            min_separation,
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise separation `q_X` (infinite for a single site).
    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Returns the minimum pairwise separation, or the first duplicate pair.
fn check_distinct(points: &[Vec<f64>]) -> Result<f64> {
    let mut q = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let r = distance(&points[i], &points[j]);
            if r <= DUPLICATE_SEPARATION {
                return Err(Error::DuplicatePoints {
                    first: i,
                    second: j,
                    separation: r,
                });
            }
            q = q.min(r);
        }
    }
    Ok(q)
}

fn check_dims(kernel: &Kernel, points: &[Vec<f64>]) -> Result<()> {
    match points.iter().find(|p| p.len() != kernel.dim()) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            got: p.len(),
        }),
        None => Ok(()),
    }
}

/// Cross matrix `(G(a_i − b_j))_{i,j}`.
pub fn cross_gram(kernel: &Kernel, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    check_dims(kernel, a)?;
    check_dims(kernel, b)?;
    let mut diff = vec![0.0; kernel.dim()];
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| {
        for ((d, x), y) in diff.iter_mut().zip(&a[i]).zip(&b[j]) {
            *d = x - y;
        }
        kernel.eval(&diff)
    }))
}

/// Gram matrix `A = (G(x_j − x_k))`, built from its upper triangle so that it
/// is exactly symmetric, with every diagonal entry equal to `G(0)`.
pub fn assemble_gram(kernel: &Kernel, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    check_dims(kernel, points)?;
    check_distinct(points)?;
    let n = points.len();
    let g0 = kernel.value_at_origin();
    let mut a = DMatrix::from_diagonal_element(n, n, g0);
    let mut diff = vec![0.0; kernel.dim()];
    for i in 0..n {
        for j in i + 1..n {
            for ((d, x), y) in diff.iter_mut().zip(&points[i]).zip(&points[j]) {
                *d = x - y;
            }
            let v = kernel.eval(&diff);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn eigen_condition(a: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(a.clone()).eigenvalues;
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Cholesky solve of `A x = b` plus one step of iterative refinement.
/// Returns the solution and the diagonal-ratio condition estimate
/// `(max L_ii / min L_ii)²`.
fn spd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let chol = a.clone().cholesky().ok_or_else(|| Error::IllConditioned {
        condition: eigen_condition(a),
    })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = (hi / lo).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let mut x = chol.solve(b);
    let r = b - a * &x;
    x += chol.solve(&r);
    Ok((x, condition))
}

/// `s(x) = Σ c_j G(x − x_j)` interpolating a [`DataSet`].
#[derive(Clone, Debug)]
pub struct Interpolant {
    kernel: Kernel,
    centers: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
    seminorm_sq: f64,
    residual_inf: f64,
    condition: f64,
    jitter: f64,
}

/// Solves `Ac = Y`. Ill-conditioning is an error; see [`fit_with_jitter`].
pub fn fit(kernel: &Kernel, data: &DataSet) -> Result<Interpolant> {
    fit_with_jitter(kernel, data, 0.0)
}

/// Solves `(A + εI)c = Y`. With `ε > 0` the interpolation conditions hold
/// only up to `ε|c|`; the residual is reported on the interpolant.
pub fn fit_with_jitter(kernel: &Kernel, data: &DataSet, jitter: f64) -> Result<Interpolant> {
    if !(jitter.is_finite() && jitter >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "jitter must be a nonnegative number, got {jitter}"
        )));
    }
    let a = assemble_gram(kernel, data.points())?;
    let mut system = a.clone();
    if jitter > 0.0 {
        for i in 0..system.nrows() {
            system[(i, i)] += jitter;
        }
    }
    let y = DVector::from_column_slice(data.values());
    let (c, condition) = spd_solve(&system, &y)?;
    let ac = &a * &c;
    let residual_inf = (&ac - &y).amax();
    let seminorm_sq = c.dot(&ac);
    Ok(Interpolant {
        kernel: kernel.clone(),
        centers: data.points().to_vec(),
        coeffs: c.as_slice().to_vec(),
        seminorm_sq,
        residual_inf,
        condition,
        jitter,
    })
}

impl Interpolant {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `‖s‖²_{N_G} = cᵀAc`.
    pub fn seminorm_sq(&self) -> f64 {
        self.seminorm_sq
    }

    /// `max_j |s(x_j) − y_j|` at fit time.
    pub fn residual_inf(&self) -> f64 {
        self.residual_inf
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut diff = vec![0.0; x.len()];
        Ok(self
            .centers
            .iter()
            .zip(&self.coeffs)
            .map(|(center, c)| {
                for ((d, a), b) in diff.iter_mut().zip(x).zip(center) {
                    *d = a - b;
                }
                c * self.kernel.eval(&diff)
            })
            .sum())
    }

    pub fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.evaluate(x)).collect()
    }

    pub fn to_model(&self) -> Model {
        Model {
            kernel: self.kernel.spec(),
            centers: self.centers.clone(),
            coeffs: self.coeffs.clone(),
            seminorm_sq: self.seminorm_sq,
            residual_inf: self.residual_inf,
            jitter: self.jitter,
        }
    }

    /// Rebuilds an interpolant from a stored model. The kernel must be
    /// reconstructible from its spec (grid kernels need their file).
    pub fn from_model(model: &Model) -> Result<Self> {
        let kernel = model.kernel.build()?;
        if model.centers.len() != model.coeffs.len() {
            return Err(Error::Malformed(format!(
                "model has {} centers but {} coefficients",
                model.centers.len(),
                model.coeffs.len()
            )));
        }
        check_dims(&kernel, &model.centers)?;
        Ok(Interpolant {
            kernel,
            centers: model.centers.clone(),
            coeffs: model.coeffs.clone(),
            seminorm_sq: model.seminorm_sq,
            residual_inf: model.residual_inf,
            condition: f64::NAN,
            jitter: model.jitter,
        })
    }
}

/// Serialized interpolant (`model.json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub kernel: KernelSpec,
    pub centers: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
    pub seminorm_sq: f64,
    pub residual_inf: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub jitter: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// Native inner product of `Σ a_i G(· − p_i)` and `Σ b_j G(· − q_j)`:
/// `aᵀ (G(p_i − q_j)) b`.
pub fn native_inner(
    kernel: &Kernel,
    p: &[Vec<f64>],
    a: &[f64],
    q: &[Vec<f64>],
    b: &[f64],
) -> Result<f64> {
    let g = cross_gram(kernel, p, q)?;
    Ok((DVector::from_column_slice(a).transpose() * g * DVector::from_column_slice(b))[(0, 0)])
}

/// Outcome of [`minimum_norm_certificate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub trials: usize,
    /// `‖s‖²_{N_G}`
    pub norm_sq: f64,
    /// `min ‖s + h‖² − ‖s‖²` over the trials.
    pub min_margin: f64,
    /// `max |⟨s, h⟩| / (‖s‖ ‖h‖)`.
    pub max_cross_term: f64,
    /// `max |‖s+h‖² − ‖s‖² − ‖h‖²| / ‖s+h‖²`.
    pub max_pythagoras_defect: f64,
    /// `max_j |h(x_j)|` relative to `max |h|` on the auxiliary sites.
    pub max_vanishing_defect: f64,
    pub pass: bool,
}

/// Tolerance on the relative cross-term `⟨s, h⟩`.
pub const CROSS_TERM_TOL: f64 = 1e-8;

/// Tests the minimum-norm property of `s` against `trials` random functions
/// `h` in the native space that vanish on the centers.
///
/// Each `h = Σ w_k G(· − z_k) + Σ v_j G(· − x_j)` combines random translates
/// at auxiliary sites `z_k` with the interpolant of `−Σ w_k G(x_j − z_k)`,
/// so `h(x_j) = 0`. All inner products are quadratic forms in the Gram
/// matrix of `X ∪ Z`.
pub fn minimum_norm_certificate(
    s: &Interpolant,
    trials: usize,
    seed: u64,
) -> Result<CertificateReport> {
    let kernel = s.kernel();
    let x = s.centers();
    let n = x.len();
    let dim = kernel.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Sample auxiliary sites from the centers' bounding box, padded.
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in x {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let pad: f64 = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max).max(1.0) * 0.25;

    let a_xx = assemble_gram(kernel, x)?;
    let chol = a_xx.clone().cholesky().ok_or_else(|| Error::IllConditioned {
        condition: eigen_condition(&a_xx),
    })?;
    let c = DVector::from_column_slice(s.coeffs());
    let norm_sq = c.dot(&(&a_xx * &c));
    let aux = n.max(2);

    let mut report = CertificateReport {
        trials,
        norm_sq,
        min_margin: f64::INFINITY,
        max_cross_term: 0.0,
        max_pythagoras_defect: 0.0,
        max_vanishing_defect: 0.0,
        pass: true,
    };
    if trials == 0 {
        report.min_margin = 0.0;
    }

    for _ in 0..trials {
        let z: Vec<Vec<f64>> = (0..aux)
            .map(|_| {
                (0..dim)
                    .map(|a| rng.random_range(lo[a] - pad..=hi[a] + pad))
                    .collect()
            })
            .collect();
        let w = DVector::from_fn(aux, |_, _| rng.random_range(-1.0..=1.0));
        let union: Vec<Vec<f64>> = x.iter().chain(&z).cloned().collect();
        let a_u = match assemble_gram(kernel, &union) {
            Ok(a) => a,
            // A random site landing on a center has probability zero; skip it.
            Err(Error::DuplicatePoints { .. }) => continue,
            Err(e) => return Err(e),
        };
        let a_xz = a_u.view((0, n), (n, aux)).into_owned();
        let g_on_x = &a_xz * &w;
        let mut v = chol.solve(&(-&g_on_x));
        let r = -&g_on_x - &a_xx * &v;
        v += chol.solve(&r);

        let h = DVector::from_iterator(n + aux, v.iter().chain(w.iter()).copied());
        let s_u = DVector::from_iterator(
            n + aux,
            c.iter().copied().chain(std::iter::repeat_n(0.0, aux)),
        );
        let a_h = &a_u * &h;
        let h_sq = h.dot(&a_h);
        let cross = s_u.dot(&a_h);
        let sum = &s_u + &h;
        let sum_sq = sum.dot(&(&a_u * &sum));
        let margin = sum_sq - norm_sq;

        let h_on_x = a_h.rows(0, n).amax();
        let h_on_z = a_h.rows(n, aux).amax().max(f64::MIN_POSITIVE);
        let rel_cross = if norm_sq > 0.0 && h_sq > 0.0 {
            cross.abs() / (norm_sq.sqrt() * h_sq.sqrt())
        } else {
            0.0
        };
        let defect = if sum_sq > 0.0 {
            (sum_sq - norm_sq - h_sq).abs() / sum_sq
        } else {
            0.0
        };
        report.min_margin = report.min_margin.min(margin);
        report.max_cross_term = report.max_cross_term.max(rel_cross);
        report.max_pythagoras_defect = report.max_pythagoras_defect.max(defect);
        report.max_vanishing_defect = report.max_vanishing_defect.max(h_on_x / h_on_z);
    }
    report.pass = report.min_margin >= 0.0 && report.max_cross_term <= CROSS_TERM_TOL;
    Ok(report)
}
