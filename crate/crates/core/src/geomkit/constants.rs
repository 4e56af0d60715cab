//! Dimensional constants of spheres, balls and the Crofton-type ratio `beta(n, k)`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Volume of the unit `k`-sphere `S^k`, i.e. `2 pi^{(k+1)/2} / Gamma((k+1)/2)`.
pub fn sphere_volume(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!("sphere_volume: k = {k} < 0")));
    }
    let h = (k as f64 + 1.0) / 2.0;
    Ok(2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)).exp())
}

/// Volume of the unit ball of `R^k`, `pi^{k/2} / Gamma(k/2 + 1)`.
pub fn ball_volume(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!("ball_volume: k = {k} < 0")));
    }
    let h = k as f64 / 2.0;
    Ok((h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp())
}

/// `Gamma((k+1)/2) Gamma((n-k+1)/2) / (Gamma(1/2) Gamma((n+1)/2))`.
pub fn beta_coeff(n: i64, k: i64) -> Result<f64> {
    if k < 0 || n < 0 || k > n {
        return Err(Error::Domain(format!("beta_coeff: need 0 <= k <= n, got n = {n}, k = {k}")));
    }
    let (n, k) = (n as f64, k as f64);
    let l = ln_gamma((k + 1.0) / 2.0) + ln_gamma((n - k + 1.0) / 2.0)
        - ln_gamma(0.5)
        - ln_gamma((n + 1.0) / 2.0);
    Ok(l.exp())
}

/// Shorthand used by the estimators, which only call it with validated indices.
pub(crate) fn s(k: usize) -> f64 {
    sphere_volume(k as i64).expect("non-negative")
}

pub(crate) fn b(k: usize) -> f64 {
    ball_volume(k as i64).expect("non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn sphere_volumes() {
        assert!(close(sphere_volume(0).unwrap(), 2.0));
        assert!(close(sphere_volume(1).unwrap(), 2.0 * PI));
        assert!(close(sphere_volume(2).unwrap(), 4.0 * PI));
        assert!(close(sphere_volume(3).unwrap(), 2.0 * PI * PI));
        assert!(sphere_volume(-1).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!(close(ball_volume(0).unwrap(), 1.0));
        assert!(close(ball_volume(1).unwrap(), 2.0));
        assert!(close(ball_volume(2).unwrap(), PI));
        assert!(close(ball_volume(3).unwrap(), 4.0 * PI / 3.0));
        assert!(ball_volume(-2).is_err());
    }

    #[test]
    fn closed_forms_up_to_ten() {
        // s_k = (k+1) b_{k+1} and the even/odd closed forms of b_k.
        let mut fact = 1.0;
        for k in 0..=10i64 {
            let sk = sphere_volume(k).unwrap();
            let bk1 = ball_volume(k + 1).unwrap();
            assert!(close(sk, (k + 1) as f64 * bk1), "k = {k}");
            if k % 2 == 0 {
                let m = k / 2;
                if m > 0 {
                    fact *= m as f64;
                }
                assert!(close(ball_volume(k).unwrap(), PI.powi(m as i32) / fact), "k = {k}");
            }
        }
    }

    #[test]
    fn beta_values() {
        for n in 0..8 {
            assert!(close(beta_coeff(n, 0).unwrap(), 1.0));
            assert!(close(beta_coeff(n, n).unwrap(), 1.0));
        }
        assert!(close(beta_coeff(2, 1).unwrap(), 2.0 / PI));
        assert!(close(beta_coeff(3, 2).unwrap(), 0.5));
        assert!(close(beta_coeff(1, 1).unwrap(), 1.0));
        assert!(beta_coeff(2, 3).is_err());
    }
}
