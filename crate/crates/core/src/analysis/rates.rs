use alloc::vec::Vec;

use libm::log;

use crate::mesh::DomainCase;
use crate::{Error, Result};

/// Number of trailing levels used for the DoF-slope fit.
pub const SLOPE_WINDOW: usize = 3;
/// Accepted deviation of a fitted `L²` DoF slope from the prediction.
pub const L2_SLOPE_TOL: f64 = 0.10;
/// Accepted deviation of a fitted `H¹` DoF slope from the prediction.
pub const H1_SLOPE_TOL: f64 = 0.05;

/// `eoc_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k)` for `k ≥ 1`.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 || hs.len() != errors.len() {
        return Err(Error::TooFewLevels {
            needed: 2,
            got: errors.len().min(hs.len()),
        });
    }
    if errors.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::ZeroError);
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| log(e[0] / e[1]) / log(h[0] / h[1]))
        .collect())
}

/// Least-squares slope of `log e` against `log #DoFs` over the last
/// [`SLOPE_WINDOW`] levels (or all of them when fewer are available).
pub fn dof_slope(errors: &[f64], dofs: &[usize]) -> Result<f64> {
    let n = errors.len().min(dofs.len());
    if n < 2 {
        return Err(Error::TooFewLevels { needed: 2, got: n });
    }
    let start = n.saturating_sub(SLOPE_WINDOW);
    let e = &errors[start..n];
    if e.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::ZeroError);
    }
    let xs: Vec<f64> = dofs[start..n].iter().map(|&d| log(d as f64)).collect();
    let ys: Vec<f64> = e.iter().map(|&v| log(v)).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Error decay predicted for `ε = c h^q`, expressed as exponents of `#DoFs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub case: DomainCase,
    pub q: f64,
    pub expected_h1_dof_slope: f64,
    pub expected_l2_dof_slope: f64,
}

/// `‖u - u_h^ε‖_{H¹} ≲ h^{min(β, sq)}`, `‖u - u_h^ε‖_{L²} ≲ h^{min(β+r, r+sq, (1+s)q)}`
/// with `h ~ #DoFs^{-1/d}`.
pub fn predicted_rates(case: DomainCase, q: f64) -> Result<RatePrediction> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    // (interface datum smoothness s, elliptic regularity r, solution regularity β)
    let (s, r, beta): (f64, f64, f64) = match case {
        DomainCase::Square | DomainCase::Cube => (0.5, 1.0, 0.5),
        DomainCase::LShape => (0.5, 2.0 / 3.0, 1.0 / 3.0),
    };
    let d = case.dim() as f64;
    let h1 = beta.min(s * q);
    let l2 = (beta + r).min(r + s * q).min((1.0 + s) * q);
    Ok(RatePrediction {
        case,
        q,
        expected_h1_dof_slope: -h1 / d,
        expected_l2_dof_slope: -l2 / d,
    })
}

impl RatePrediction {
    pub fn l2_within(&self, fitted: f64) -> bool {
        (fitted - self.expected_l2_dof_slope).abs() <= L2_SLOPE_TOL
    }

    pub fn h1_within(&self, fitted: f64) -> bool {
        (fitted - self.expected_h1_dof_slope).abs() <= H1_SLOPE_TOL
    }
}
