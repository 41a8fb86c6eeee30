//! Gauss-Newton least squares for the saturating-exponential infidelity
//! model eps(x) = a (exp(-b x) - 1).

use crate::error::{Error, Result};

/// Fitted parameters and the residual 2-norm at the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub residual: f64,
}

pub fn model(a: f64, b: f64, x: f64) -> f64 {
    a * ((-b * x).exp() - 1.0)
}

fn residual_norm(a: f64, b: f64, xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys.iter())
        .map(|(&x, &y)| (model(a, b, x) - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Gauss-Newton with backtracking line search, two parameters (a, b).
pub fn fit_saturating_exponential(xs: &[f64], ys: &[f64], init: (f64, f64)) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three points for a two-parameter fit".into(),
        ));
    }
    let (mut a, mut b) = init;
    let mut cost = residual_norm(a, b, xs, ys);
    for _ in 0..200 {
        // normal equations J^T J d = -J^T r
        let (mut jtj00, mut jtj01, mut jtj11) = (0.0f64, 0.0f64, 0.0f64);
        let (mut jtr0, mut jtr1) = (0.0f64, 0.0f64);
        for (&x, &y) in xs.iter().zip(ys.iter()) {
            let e = (-b * x).exp();
            let r = a * (e - 1.0) - y;
            let ja = e - 1.0;
            let jb = -a * x * e;
            jtj00 += ja * ja;
            jtj01 += ja * jb;
            jtj11 += jb * jb;
            jtr0 += ja * r;
            jtr1 += jb * r;
        }
        let det = jtj00 * jtj11 - jtj01 * jtj01;
        if det.abs() < 1e-300 {
            return Err(Error::Numerical(format!(
                "singular normal equations (residual {cost:.3e})"
            )));
        }
        let da = -(jtj11 * jtr0 - jtj01 * jtr1) / det;
        let db = -(-jtj01 * jtr0 + jtj00 * jtr1) / det;

        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let (na, nb) = (a + step * da, b + step * db);
            let ncost = residual_norm(na, nb, xs, ys);
            if ncost < cost {
                a = na;
                b = nb;
                let rel = (cost - ncost) / cost.max(1e-300);
                cost = ncost;
                improved = true;
                if rel < 1e-14 {
                    return Ok(FitResult {
                        a,
                        b,
                        residual: cost,
                    });
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !cost.is_finite() {
        return Err(Error::Numerical("fit diverged".into()));
    }
    Ok(FitResult {
        a,
        b,
        residual: cost,
    })
}

/// x at which the fitted model crosses `level`.
pub fn model_crossing(fit: &FitResult, level: f64) -> Result<f64> {
    let arg = 1.0 + level / fit.a;
    if arg <= 0.0 {
        return Err(Error::Numerical(format!(
            "model never reaches level {level} (a = {})",
            fit.a
        )));
    }
    Ok(-arg.ln() / fit.b)
}
