//! Special functions needed by the Matérn family.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Taylor coefficients of `1/Γ(x) = Σ_{k≥1} c_k x^k`.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Temme's auxiliary functions for `|μ| ≤ 1/2`:
/// `Γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ))/(2μ)`, `Γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ))/2`,
/// returned with `1/Γ(1+μ)` and `1/Γ(1−μ)`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    // 1/Γ(1+x) = Σ c_{k+1} x^k: even powers give Γ₂, odd powers give −Γ₁.
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (k, &c) in RGAMMA.iter().enumerate().rev() {
        if k % 2 == 0 {
            g2 = g2 * mu2 + c;
        } else {
            g1 = g1 * mu2 + c;
        }
    }
    let g1 = -g1;
    (g1, g2, g2 - mu * g1, g2 + mu * g1)
}

/// `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`.
fn k_pair_small_order(mu: f64, x: f64) -> (f64, f64) {
    if x < 2.0 {
        temme_series(mu, x)
    } else {
        steed_cf2(mu, x)
    }
}

fn temme_series(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, rg_plus, rg_minus) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    // p = (x/2)^{−μ}Γ(1+μ)/2, q = (x/2)^{μ}Γ(1−μ)/2
    let mut p = 0.5 * ee / rg_plus;
    let mut q = 0.5 / (ee * rg_minus);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

fn steed_cf2(mu: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

/// Modified Bessel function of the second kind `K_ν(z)` for real order and
/// `z > 0`.
///
/// Temme's series (`z < 2`) or Steed's continued fraction (`z ≥ 2`) give
/// `K_μ, K_{μ+1}` for the reduced order `|μ| ≤ 1/2`; the stable upward
/// recurrence `K_{μ+1} = (2μ/z)K_μ + K_{μ−1}` reaches `|ν|`.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bessel_k requires z > 0, got {z}"
        )));
    }
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite order {nu}")));
    }
    let nu = nu.abs();
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut k_mu, mut k_next) = k_pair_small_order(mu, z);
    let two_over_z = 2.0 / z;
    for i in 1..=(steps as usize) {
        let k_new = (mu + i as f64) * two_over_z * k_next + k_mu;
        k_mu = k_next;
        k_next = k_new;
    }
    Ok(k_mu)
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half requires k >= 1");
    if k % 2 == 0 {
        (1..k / 2).map(f64::from).product()
    } else {
        // Γ(j + 1/2) = √π · Π_{i<j} (i + 1/2)
        let j = (k - 1) / 2;
        PI.sqrt() * (0..j).map(|i| i as f64 + 0.5).product::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_closed_forms() {
        for &z in &[1e-3, 0.3, 1.0, 1.9, 2.0, 2.1, 7.5, 40.0] {
            let k12 = (PI / (2.0 * z)).sqrt() * (-z).exp();
            let k32 = k12 * (1.0 + 1.0 / z);
            let k52 = k12 * (1.0 + 3.0 / z + 3.0 / (z * z));
            for (nu, exact) in [(0.5, k12), (1.5, k32), (2.5, k52)] {
                let v = bessel_k(nu, z).unwrap();
                assert!((v - exact).abs() <= 1e-13 * exact, "K_{nu}({z}) = {v} vs {exact}");
            }
        }
    }

    #[test]
    fn reference_values() {
        // K_0(1), K_1(1), K_0(2), K_1(0.1)
        let cases = [
            (0.0, 1.0, 0.421_024_438_240_708_3),
            (1.0, 1.0, 0.601_907_230_197_234_6),
            (0.0, 2.0, 0.113_893_872_749_533_4),
            (1.0, 0.1, 9.853_844_780_870_606),
        ];
        for (nu, z, exact) in cases {
            let v = bessel_k(nu, z).unwrap();
            assert!((v - exact).abs() <= 1e-13 * exact, "K_{nu}({z}) = {v} vs {exact}");
        }
    }

    #[test]
    fn order_symmetry() {
        for &(nu, z) in &[(0.3, 0.7), (2.75, 3.1), (9.2, 0.01)] {
            assert_eq!(bessel_k(nu, z).unwrap(), bessel_k(-nu, z).unwrap());
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(1.0, -2.0).is_err());
        assert!(bessel_k(1.0, f64::NAN).is_err());
    }

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(8), 6.0);
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }
}
