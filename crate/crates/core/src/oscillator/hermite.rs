//! Normalized Hermite functions hₙ(ξ) = (2ⁿ n! √π)^(-1/2) Hₙ(ξ) e^(-ξ²/2).
//!
//! The upward recurrence
//!   h₀ = π^(-1/4) e^(-ξ²/2),  h₁ = √2 ξ h₀,
//!   hₙ₊₁ = √(2/(n+1)) ξ hₙ − √(n/(n+1)) hₙ₋₁
//! carries the normalization along, so no factorials or powers of two
//! are ever formed.

const PI_QUARTER_INV: f64 = 0.751_125_544_464_942_5; // π^(-1/4)

/// h₀(ξ)..h_{n_max}(ξ), written into `out` (length n_max + 1).
pub fn hermite_functions_into(xi: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else { return };
    *first = PI_QUARTER_INV * (-0.5 * xi * xi).exp();
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * xi * out[0];
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    hermite_functions_into(xi, &mut out);
    out
}

pub fn hermite_function(n: usize, xi: f64) -> f64 {
    hermite_functions(n, xi)[n]
}
