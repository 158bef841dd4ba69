//! Uniform tensor grids and their dual frequency grids.
//!
//! A grid with extent `R` and `M` points per axis has nodes
//! `x_j = (j − M/2)·h`, `h = 2R/M`, for `j = 0..M`, so the origin is node
//! `M/2`. The dual grid has nodes `y_k = (k − M/2)·Δy` with `Δy = π/R`.
//! Samples are stored row-major (last axis fastest).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    /// Half-width `R` of the physical box `[-R, R)` on every axis.
    pub extent: f64,
    /// Samples per axis; an even number (powers of two are fastest).
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        let g = GridSpec {
            dim,
            extent,
            points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Grid(format!(
                "grid dimension {} outside 1..=3",
                self.dim
            )));
        }
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::Grid(format!("extent {} must be positive", self.extent)));
        }
        if self.points < 4 || self.points % 2 != 0 {
            return Err(Error::Grid(format!(
                "points per axis {} must be even and >= 4",
                self.points
            )));
        }
        if self.points.checked_pow(self.dim as u32).is_none_or(|n| n > 1 << 27) {
            return Err(Error::Grid(format!(
                "{}^{} samples exceed the grid size limit",
                self.points, self.dim
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn dual_spacing(&self) -> f64 {
        PI / self.extent
    }

    /// Period `W = M·Δy = 2π/h` of the dual grid.
    pub fn dual_period(&self) -> f64 {
        self.points as f64 * self.dual_spacing()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn dual_cell_volume(&self) -> f64 {
        self.dual_spacing().powi(self.dim as i32)
    }

    /// Axis index of the origin.
    pub fn center(&self) -> usize {
        self.points / 2
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    pub fn dual_coord(&self, k: usize) -> f64 {
        (k as f64 - self.center() as f64) * self.dual_spacing()
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().map(|i| self.coord(i)).collect()
    }

    pub fn dual_node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|k| self.dual_coord(k))
            .collect()
    }

    /// Flat index of the node mirrored through the origin (periodic).
    pub fn mirror(&self, flat: usize) -> usize {
        let m = self.points;
        let c = self.center();
        let idx: Vec<usize> = self
            .multi_index(flat)
            .into_iter()
            .map(|i| (2 * c + m - i) % m)
            .collect();
        self.flat_index(&idx)
    }

    /// True when any axis index sits on the first or last node.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .into_iter()
            .any(|i| i == 0 || i + 1 == self.points)
    }

    /// Same grid with twice the points per axis (half the spacing).
    pub fn refined(&self) -> Self {
        GridSpec {
            points: self.points * 2,
            ..*self
        }
    }

    pub fn sample<F>(&self, mut f: F) -> Vec<f64>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut x = vec![0.0; self.dim];
        (0..self.len())
            .map(|flat| {
                for (slot, i) in x.iter_mut().zip(self.multi_index(flat)) {
                    *slot = self.coord(i);
                }
                f(&x)
            })
            .collect()
    }

    pub fn sample_dual<F>(&self, mut f: F) -> Vec<f64>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut y = vec![0.0; self.dim];
        (0..self.len())
            .map(|flat| {
                for (slot, k) in y.iter_mut().zip(self.multi_index(flat)) {
                    *slot = self.dual_coord(k);
                }
                f(&y)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `Σ_j a_j e^{−i x_j·y_k}`
    Forward,
    /// `Σ_k a_k e^{+i x_j·y_k}`
    Inverse,
}

/// Centered multi-dimensional DFT:
/// `out_j = Σ_k in_k exp(±2πi (j − M/2)(k − M/2)/M)` along every axis.
pub fn centered_dft(grid: &GridSpec, data: &mut [Complex64], dir: Direction) {
    assert_eq!(data.len(), grid.len(), "data length does not match grid");
    let m = grid.points;
    let fft: Arc<dyn Fft<f64>> = {
        let mut planner = FftPlanner::new();
        match dir {
            Direction::Forward => planner.plan_fft_forward(m),
            Direction::Inverse => planner.plan_fft_inverse(m),
        }
    };
    // exp(±2πi (j−c)(k−c)/M) = exp(±2πi jk/M)·(−1)^j·(−1)^k·(−1)^{M/2} for c = M/2.
    let global = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let parity = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };

    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..grid.dim {
        let stride = m.pow((grid.dim - 1 - axis) as u32);
        let block = stride * m;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride] * parity(k);
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = v * (parity(j) * global);
                }
            }
        }
    }
}

/// Continuous Fourier transform `f̂(y) = (2π)^{−d/2} ∫ f(x) e^{−ix·y} dx`
/// of grid samples on the dual grid, by the trapezoid rule.
pub fn forward_transform(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    centered_dft(grid, &mut data, Direction::Forward);
    let scale = (2.0 * PI).powf(-(grid.dim as f64) / 2.0) * grid.cell_volume();
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

/// Inverse continuous transform `f(x) = (2π)^{−d/2} ∫ f̂(y) e^{ix·y} dy`
/// of dual-grid samples, by the trapezoid rule.
pub fn inverse_transform(grid: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut data = spectrum.to_vec();
    centered_dft(grid, &mut data, Direction::Inverse);
    let scale = (2.0 * PI).powf(-(grid.dim as f64) / 2.0) * grid.dual_cell_volume();
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(grid: &GridSpec, data: &[Complex64], sign: f64) -> Vec<Complex64> {
        (0..grid.len())
            .map(|j| {
                let xj = grid.multi_index(j);
                (0..grid.len())
                    .map(|k| {
                        let yk = grid.multi_index(k);
                        let phase: f64 = xj
                            .iter()
                            .zip(&yk)
                            .map(|(&a, &b)| {
                                let c = grid.center() as f64;
                                (a as f64 - c) * (b as f64 - c)
                            })
                            .sum::<f64>()
                            * 2.0
                            * PI
                            / grid.points as f64;
                        data[k] * Complex64::from_polar(1.0, sign * phase)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn centered_dft_matches_direct_sum() {
        for (dim, m) in [(1, 8), (1, 6), (2, 4), (3, 4)] {
            let grid = GridSpec::new(dim, 1.0, m).unwrap();
            let data: Vec<Complex64> = (0..grid.len())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut fast = data.clone();
                centered_dft(&grid, &mut fast, dir);
                let slow = naive(&grid, &data, sign);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-10, "dim {dim} m {m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn gaussian_transform_is_gaussian() {
        // f = e^{-x²/2} is its own unitary Fourier transform.
        let grid = GridSpec::new(1, 12.0, 128).unwrap();
        let f = grid.sample(|x| (-0.5 * x[0] * x[0]).exp());
        let fh = forward_transform(&grid, &f);
        for k in 0..grid.points {
            let y = grid.dual_coord(k);
            assert!((fh[k].re - (-0.5 * y * y).exp()).abs() < 1e-12);
            assert!(fh[k].im.abs() < 1e-12);
        }
        let back = inverse_transform(&grid, &fh);
        for (a, b) in back.iter().zip(&f) {
            assert!((a.re - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_and_boundary() {
        let grid = GridSpec::new(2, 1.0, 8).unwrap();
        let c = grid.flat_index(&[4, 4]);
        assert_eq!(grid.mirror(c), c);
        let a = grid.flat_index(&[5, 2]);
        assert_eq!(grid.mirror(a), grid.flat_index(&[3, 6]));
        assert!(grid.is_boundary(grid.flat_index(&[0, 3])));
        assert!(!grid.is_boundary(grid.flat_index(&[1, 6])));
        assert_eq!(grid.node(c), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(4, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 0.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 7).is_err());
    }
}
