//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 50;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    let mut worst = 0.0f64;
    while let Some((lo, hi, local_tol, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::NonFinite("quadrature"));
        }
        if err <= local_tol || depth >= MAX_DEPTH {
            if err > local_tol {
                worst = worst.max(err);
            }
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * local_tol, depth + 1));
            stack.push((mid, hi, 0.5 * local_tol, depth + 1));
        }
    }
    if worst > tol {
        return Err(Error::Quadrature { error: worst });
    }
    Ok(total)
}

/// `E[h(Y)]` for `Y ~ N(0, variance)`. The integral is truncated at
/// 14 standard deviations, where the Gaussian tail mass is below 1e-44.
pub fn gaussian_expectation<F: Fn(f64) -> f64>(h: F, variance: f64, tol: f64) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!("variance {variance} must be positive")));
    }
    let sd = variance.sqrt();
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let density = |y: f64| norm * (-0.5 * y * y / variance).exp();
    let half = 14.0 * sd;
    // Split at zero: the reciprocal-quadratic integrands peak there.
    let left = integrate(|y| h(y) * density(y), -half, 0.0, 0.5 * tol)?;
    let right = integrate(|y| h(y) * density(y), 0.0, half, 0.5 * tol)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x| 1.0 / (1.0 + x * x), -50.0, 50.0, 1e-11).unwrap();
        assert!((v - 2.0 * 50f64.atan()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_moments() {
        for var in [0.5, 1.0, 1.0 / 0.19] {
            let m0 = gaussian_expectation(|_| 1.0, var, 1e-10).unwrap();
            let m2 = gaussian_expectation(|y| y * y, var, 1e-10).unwrap();
            let m4 = gaussian_expectation(|y| y.powi(4), var, 1e-9).unwrap();
            assert!((m0 - 1.0).abs() < 1e-10);
            assert!((m2 - var).abs() < 1e-9);
            assert!((m4 - 3.0 * var * var).abs() < 1e-8);
        }
    }
}
