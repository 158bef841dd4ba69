//! Reference computations kept independent of the library's own numerics.

#![allow(dead_code)]

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_a^b f` split into `pieces` equal panels, each integrated adaptively.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| simpson(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / pieces as f64))
        .sum()
}

/// `K_ν(z) = ∫₀^∞ exp(−z cosh t) cosh(νt) dt` by the trapezoid rule, which
/// converges geometrically here: the integrand is even in `t` and analytic.
/// Truncated where it has fallen 50 e-folds below its peak.
pub fn bessel_k_oracle(nu: f64, z: f64) -> f64 {
    let nu = nu.abs();
    let peak = (nu / z).asinh();
    let log_f = |t: f64| -z * t.cosh() + nu * t;
    let top = log_f(peak);
    let mut end = peak + 0.5;
    while log_f(end) > top - 50.0 {
        end += 0.5;
    }
    let width = 1.0 / (z * peak.cosh()).sqrt();
    let h = width.min(1.0) / 64.0;
    let n = (end / h).ceil() as usize;
    let f = |t: f64| ((-z * t.cosh() + nu * t - top).exp() + (-z * t.cosh() - nu * t - top).exp()) * 0.5;
    let sum = 0.5 * f(0.0) + (1..=n).map(|i| f(i as f64 * h)).sum::<f64>();
    sum * h * top.exp()
}

/// Dense Gaussian elimination with partial pivoting and two refinement
/// steps; `a` is row-major `n × n`.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut m: Vec<Vec<f64>> = a.iter().zip(rhs).map(|(row, &r)| {
            let mut v = row.clone();
            v.push(r);
            v
        }).collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
            m.swap(col, piv);
            for row in col + 1..n {
                let factor = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
            x[row] = (m[row][n] - s) / m[row][row];
        }
        x
    };
    let mut x = solve(b);
    for _ in 0..2 {
        let r: Vec<f64> = (0..n)
            .map(|i| b[i] - a[i].iter().zip(&x).map(|(p, q)| p * q).sum::<f64>())
            .collect();
        let dx = solve(&r);
        x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
    }
    x
}
