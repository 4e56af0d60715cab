//! The local identities `sigma_k - sigma_{k+1} = L_k^loc = lim Lambda_k / (b_k eps^k)`.

use serde::{Deserialize, Serialize};

use super::cone::ConeGerm;
use super::local::{local_lambda, local_polar_length};
use super::sigma::{sigma_invariant, SliceOptions};
use crate::error::Result;
use crate::geomkit::{Estimate, RandomSource};
use crate::lkmeasure::LkOptions;

/// Sample budgets for the three local estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct GermBudget {
    pub sigma_samples: usize,
    pub planes: usize,
    pub lk: LkOptions,
    pub eps_ladder: Vec<f64>,
    pub slice: SliceOptions,
    /// Agreement threshold in combined standard errors.
    pub tolerance: f64,
}

impl Default for GermBudget {
    fn default() -> Self {
        Self {
            sigma_samples: 4000,
            planes: 2000,
            lk: LkOptions::default(),
            eps_ladder: vec![1.0, 0.5, 0.25],
            slice: SliceOptions::default(),
            tolerance: 3.0,
        }
    }
}

/// `|a - b| <= tol * sqrt(se_a^2 + se_b^2)`, up to rounding of exact values.
pub fn agree(a: &Estimate, b: &Estimate, tol: f64) -> bool {
    let slack = 1e-12 * a.value.abs().max(b.value.abs()).max(1.0);
    (a.value - b.value).abs() <= tol * a.combined_se(b) + slack
}

fn difference(a: Estimate, b: Estimate) -> Estimate {
    Estimate::sum([a, b.scale(-1.0)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalRow {
    pub k: usize,
    pub sigma_diff: Estimate,
    pub l_loc: Estimate,
    pub lambda_loc: Estimate,
    /// Rejected samples over all three estimators.
    pub rejected: usize,
    pub pass: bool,
}

/// Two-sided check `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReport {
    pub germ: String,
    pub rows: Vec<LocalRow>,
    pub checks: Vec<IdentityCheck>,
}

impl LocalReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }
}

/// Rows `(sigma_k - sigma_{k+1}, L_k^loc, local Lambda_k)` for each `k` in
/// `ks`, and the checks `sigma_n = L_n^loc` and `L_0^loc = 1 - sigma_1`.
pub fn verify_local_identities(x: &ConeGerm, ks: &[usize], budget: &GermBudget, src: &RandomSource) -> Result<LocalReport> {
    let n = x.ambient_dim();
    let sigma = |k: usize| -> Result<Estimate> {
        if k > n {
            return Ok(Estimate::exact(0.0));
        }
        sigma_invariant(x, k, budget.sigma_samples, &budget.slice, &src.substream(k as u64))
    };
    let tol = budget.tolerance;
    let mut rows = Vec::new();
    for &k in ks {
        let sigma_diff = difference(sigma(k)?, sigma(k + 1)?);
        let lp = local_polar_length(x, k, budget.planes, budget.slice.max_rejection, &src.substream(k as u64))?;
        let ll = local_lambda(x, k, &budget.eps_ladder, &budget.lk, &src.substream(k as u64))?;
        let pass = agree(&sigma_diff, &lp.estimate, tol)
            && agree(&sigma_diff, &ll.estimate, tol)
            && agree(&lp.estimate, &ll.estimate, tol)
            && ll.converged;
        rows.push(LocalRow { k, sigma_diff, l_loc: lp.estimate, lambda_loc: ll.estimate, rejected: lp.rejected, pass });
    }
    let top_sigma = sigma(n)?;
    let top_l = local_polar_length(x, n, budget.planes, budget.slice.max_rejection, &src.substream(n as u64))?.estimate;
    let one_minus_sigma1 = difference(Estimate::exact(1.0), sigma(1)?);
    let l0 = local_polar_length(x, 0, budget.planes, budget.slice.max_rejection, &src.substream(0))?.estimate;
    let checks = vec![
        IdentityCheck { name: "sigma_n = L_n^loc".into(), lhs: top_sigma, rhs: top_l, pass: agree(&top_sigma, &top_l, tol) },
        IdentityCheck {
            name: "L_0^loc = 1 - sigma_1".into(),
            lhs: l0,
            rhs: one_minus_sigma1,
            pass: agree(&l0, &one_minus_sigma1, tol),
        },
    ];
    Ok(LocalReport { germ: x.name.clone(), rows, checks })
}
