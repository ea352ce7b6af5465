//! Gamma-function helpers: sphere areas, Pochhammer symbols.

use statrs::function::gamma::gamma;

/// Surface area `|S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// Rising factorial `(x)_m = x (x+1) ... (x+m-1)`.
pub fn pochhammer(x: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// `(x)_m / m!`, accumulated as a product of ratios so it does not overflow for large `m`.
pub fn pochhammer_over_factorial(x: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (x + j as f64) / (j as f64 + 1.0))
}

/// `sqrt(pi) Gamma((n-1)/2) / Gamma(n/2)`, i.e. the integral of `(1-t^2)^((n-3)/2)` over `[-1, 1]`.
pub fn beta_half(n: usize) -> f64 {
    let n = n as f64;
    std::f64::consts::PI.sqrt() * gamma((n - 1.0) / 2.0) / gamma(n / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(4.0, 3), 120.0);
        assert_eq!(pochhammer(2.0, 0), 1.0);
        assert!((pochhammer_over_factorial(4.0, 3) - 20.0).abs() < 1e-13);
    }

    #[test]
    fn beta_half_matches_known_values() {
        // n = 2: integral of (1-t^2)^(-1/2) is pi; n = 3: integral of 1 is 2.
        assert!((beta_half(2) - PI).abs() < 1e-13);
        assert!((beta_half(3) - 2.0).abs() < 1e-13);
    }
}
