//! Complex polynomial arithmetic and simultaneous root finding (Aberth–Ehrlich).
//!
//! Coefficients are stored in ascending order: `c[0] + c[1] x + ... + c[d] x^d`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Value and derivative by Horner's rule.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `sum_k |c_k| |x|^k`, the natural scale for a relative residual.
pub fn magnitude_scale(coeffs: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Multiplies `poly` by `(c0 + c1 x)`.
pub fn mul_linear(poly: &[Complex64], c0: Complex64, c1: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (k, &p) in poly.iter().enumerate() {
        out[k] += p * c0;
        out[k + 1] += p * c1;
    }
    out
}

pub fn add_assign(acc: &mut Vec<Complex64>, other: &[Complex64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Complex64::new(0.0, 0.0));
    }
    for (a, &b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// All complex roots of the polynomial, with multiplicity.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    roots_from(coeffs, None)
}

/// Like [`roots`], starting the iteration from `guess` when it holds one
/// finite value per root (e.g. the roots of a nearby polynomial).
pub fn roots_from(coeffs: &[Complex64], guess: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| *v == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    let degree = c.len().saturating_sub(1);
    match degree {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-c[0] / c[1]]),
        _ => {}
    }

    // Initial guesses on a circle of radius given by the Fujiwara-type bound.
    let lead = c[degree];
    let radius = (0..degree)
        .map(|k| (c[k] / lead).norm().powf(1.0 / (degree - k) as f64))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = match guess {
        Some(g) if g.len() == degree && g.iter().all(|v| v.is_finite()) => g.to_vec(),
        _ => (0..degree)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
                Complex64::from_polar(radius, theta)
            })
            .collect(),
    };

    let mut converged = vec![false; degree];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..degree {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&c, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                converged[i] = true;
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 0.0 && (newton / denom).is_finite() {
                newton / denom
            } else {
                newton
            };
            if !step.is_finite() {
                continue;
            }
            // a residual at rounding level cannot be improved, however small |z| is
            let at_rounding = p.norm() <= 4.0 * f64::EPSILON * magnitude_scale(&c, z[i]);
            z[i] -= step;
            if at_rounding || step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                converged[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    // Aberth can stall near clustered roots; accept when residuals are at rounding level.
    let ok = z.iter().all(|&r| {
        let scale = magnitude_scale(&c, r);
        eval(&c, r).norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE)
    });
    if ok {
        Ok(z)
    } else {
        Err(Error::RootFinder { degree })
    }
}
