use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::{apply_i, IMultiplierProfile, ProfileKind};
use crate::solver::rescale;
use crate::spectral::Field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleRow {
    pub lambda: f64,
    pub hs_norm: f64,
    pub smoothed_h1_norm: f64,
    pub l2_ratio: f64,
    pub l2_ratio_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleTable {
    pub s: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub epsilon: f64,
    pub rows: Vec<RescaleRow>,
    pub hs_nonincreasing: bool,
    pub smoothed_h1_nonincreasing: bool,
    /// Largest `| ||phi^l||_2 / ||phi||_2 - l^(-1/2) |` over the list.
    pub max_l2_ratio_error: f64,
    /// Log-log slope of the H^s norm against lambda (reported, not asserted).
    pub measured_hs_rate: f64,
    /// First listed lambda with `||I phi^lambda||_{H^1} <= epsilon`.
    pub lambda_reaching_epsilon: Option<f64>,
    /// `(N^(1-s) ||phi||_{H^s} / epsilon)^(1/(s+1/2))`, the scaling needed if
    /// the smoothing and rescaling bounds held with constant 1.
    pub predicted_lambda: f64,
    /// `N^(2(1-s)/(1+2s))`, the data-independent scaling law.
    pub scaling_law: f64,
}

/// Norms of `phi^lambda = phi(x/lambda)/lambda` for each listed lambda,
/// computed on the stretched grid.
pub fn rescaled_norm_check(
    phi: &Field,
    s: f64,
    n: f64,
    lambdas: &[f64],
    epsilon: f64,
    profile: ProfileKind,
) -> Result<RescaleTable> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| w[0] >= w[1]) || lambdas[0] < 1.0 {
        return Err(Error::InvalidArgument("lambda list must be strictly increasing and start at 1 or above".into()));
    }
    let prof = IMultiplierProfile::new(n, s, profile)?;
    let base_l2 = phi.l2_norm();
    let rows: Vec<RescaleRow> = lambdas
        .iter()
        .map(|&lambda| {
            let scaled = rescale(phi, lambda, None)?;
            let l2_ratio = scaled.l2_norm() / base_l2;
            Ok(RescaleRow {
                lambda,
                hs_norm: scaled.sobolev_norm(s),
                smoothed_h1_norm: apply_i(&scaled, &prof).sobolev_norm(1.0),
                l2_ratio,
                l2_ratio_error: (l2_ratio - lambda.powf(-0.5)).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let nonincreasing = |f: fn(&RescaleRow) -> f64| rows.windows(2).all(|w| f(&w[1]) <= f(&w[0]));
    let rate = crate::experiments::log_log_slope(&rows.iter().map(|r| (r.lambda, r.hs_norm)).collect::<Vec<_>>());
    Ok(RescaleTable {
        s,
        n,
        epsilon,
        hs_nonincreasing: nonincreasing(|r| r.hs_norm),
        smoothed_h1_nonincreasing: nonincreasing(|r| r.smoothed_h1_norm),
        max_l2_ratio_error: rows.iter().map(|r| r.l2_ratio_error).fold(0.0, f64::max),
        measured_hs_rate: rate,
        lambda_reaching_epsilon: rows.iter().find(|r| r.smoothed_h1_norm <= epsilon).map(|r| r.lambda),
        predicted_lambda: (n.powf(1.0 - s) * phi.sobolev_norm(s) / epsilon).powf(1.0 / (s + 0.5)),
        scaling_law: n.powf(2.0 * (1.0 - s) / (1.0 + 2.0 * s)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::soliton;
    use crate::spectral::SpectralGrid;

    #[test]
    fn soliton_scaling() {
        let g = SpectralGrid::new(40.0, 256).unwrap();
        let phi = soliton(1.0, 20.0, &g).unwrap();
        let t = rescaled_norm_check(&phi, 0.5, 2.0, &[1.0, 2.0, 4.0, 8.0, 16.0], 0.1, ProfileKind::Sharp).unwrap();
        assert!(t.max_l2_ratio_error < 1e-6);
        assert!(t.hs_nonincreasing && t.smoothed_h1_nonincreasing);
        assert!((t.rows[0].hs_norm - phi.sobolev_norm(0.5)).abs() < 1e-12);
        assert!(rescaled_norm_check(&phi, 0.5, 2.0, &[2.0, 2.0], 0.1, ProfileKind::Sharp).is_err());
    }
}
