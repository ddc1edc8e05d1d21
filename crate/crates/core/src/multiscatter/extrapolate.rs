use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Polynomial extrapolation of samples `f(eps)` to `eps = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub limit: Complex64,
    /// Difference between the last two extrapolation levels.
    pub error: f64,
    /// Level `k` interpolates the `k + 1` largest-eps samples.
    pub levels: Vec<Complex64>,
}

/// Neville extrapolation to `eps = 0`, adding samples from the largest eps
/// down. Fails when the level-to-level corrections grow.
pub fn eps_extrapolate(samples: &[(f64, Complex64)]) -> Result<Extrapolation> {
    let fail = |detail: alloc::string::String| Error::Extrapolation {
        detail,
        samples: samples.to_vec(),
    };
    if samples.len() < 2 {
        return Err(fail("at least two samples are required".into()));
    }
    let mut pts = samples.to_vec();
    if pts
        .iter()
        .any(|&(e, v)| !(e > 0.0 && e.is_finite()) || !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(fail("samples need positive eps and finite values".into()));
    }
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(fail("duplicate eps".into()));
    }
    let n = pts.len();
    // p[i] holds the interpolant through samples i..=i+k evaluated at 0.
    let mut p: Vec<Complex64> = pts.iter().map(|s| s.1).collect();
    let mut levels = alloc::vec![p[0]];
    for k in 1..n {
        for i in 0..n - k {
            let (xi, xk) = (pts[i].0, pts[i + k].0);
            p[i] = (p[i] * (-xk) + p[i + 1] * xi) / (xi - xk);
        }
        levels.push(p[0]);
    }
    let scale = pts.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let floor = 1e-9 * scale;
    let steps: Vec<f64> = levels.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    for w in steps.windows(2) {
        if w[1] > w[0] + floor {
            return Err(fail(format!(
                "corrections grow from {:.3e} to {:.3e}",
                w[0], w[1]
            )));
        }
    }
    Ok(Extrapolation {
        limit: levels[n - 1],
        error: steps[steps.len() - 1],
        levels,
    })
}
