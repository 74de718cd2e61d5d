//! Fourier multipliers of the interior and boundary residuals on the sine
//! basis `φ_n = √(2/L) sin(ξ_n x)`, `ξ_n = nπ/L`.

use crate::error::{Error, Result};
use crate::numerics::{nyquist_guard, theta, DEFAULT_GUARD_TOL};

/// Relative distance `|ξ² - k²| / k²` below which the interior multiplier
/// is rejected.
pub const RESONANCE_TOL: f64 = 1e-12;

/// `|ξ - k|·h` below which the removable singularity at `ξ = k` is
/// evaluated by a Taylor expansion.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// One frequency sample of a multiplier and its analytic bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSample {
    pub xi: f64,
    pub value: f64,
    pub bound: f64,
}

impl MultiplierSample {
    /// `|value| ≤ bound·(1 + rel_slack)`.
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.value.abs() <= self.bound * (1.0 + rel_slack)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `M_h(ξ) = (Θ(kh)·(4/h²) sin²(ξh/2) - ξ²) / (ξ² - k²)`.
pub fn interior_multiplier(xi: f64, h: f64, k: f64) -> Result<f64> {
    nyquist_guard(k, h, DEFAULT_GUARD_TOL)?;
    if !((xi * xi - k * k).abs() > RESONANCE_TOL * k * k) {
        return Err(Error::NearResonantFrequency { xi, k });
    }
    let th = theta(k * h)?;
    let delta = xi - k;
    if (delta * h).abs() < SERIES_THRESHOLD {
        // q(ξ) = Θ(2/h²)(1 - cos ξh) - ξ² vanishes at ξ = k
        let (sn, cs) = (k * h).sin_cos();
        let q1 = th * 2.0 / h * sn - 2.0 * k;
        let q2 = 2.0 * th * cs - 2.0;
        let q3 = -2.0 * th * h * sn;
        let q4 = -2.0 * th * h * h * cs;
        let q_over_delta = q1 + delta * (q2 / 2.0 + delta * (q3 / 6.0 + delta * q4 / 24.0));
        return Ok(q_over_delta / (xi + k));
    }
    // Θ·(4/h²)sin²(ξh/2) = ξ²Θ·sinc²(ξh/2) and Θ·sinc²(kh/2) = 1
    let a = sinc(0.5 * xi * h);
    let b = sinc(0.5 * k * h);
    Ok(xi * xi * th * (a - b) * (a + b) / ((xi - k) * (xi + k)))
}

/// `Θ(kh)·h²ξ²/12`.
pub fn interior_multiplier_bound(xi: f64, h: f64, k: f64) -> Result<f64> {
    Ok(theta(k * h)? * h * h * xi * xi / 12.0)
}

/// `B_h(ξ) = √(2/L)·(h/sin kh)·(kh·sin ξh - ξh·sin kh)/((ξh)² - (kh)²)`.
///
/// The singularity at `ξ = k` is removable and is evaluated by a series,
/// so no resonance error is raised.
pub fn boundary_multiplier(xi: f64, h: f64, k: f64, length: f64) -> Result<f64> {
    nyquist_guard(k, h, DEFAULT_GUARD_TOL)?;
    let (a, b) = (xi * h, k * h);
    let sin_b = b.sin();
    let scale = (2.0 / length).sqrt() * h / sin_b;
    let delta = a - b;
    let ratio = if delta.abs() < SERIES_THRESHOLD {
        // N(a) = b sin a - a sin b expanded about a = b
        let cos_b = b.cos();
        let n_over_delta =
            (b * cos_b - sin_b) - 0.5 * delta * b * sin_b - delta * delta / 6.0 * b * cos_b
                + delta * delta * delta / 24.0 * b * sin_b;
        n_over_delta / (a + b)
    } else {
        // b sin a - a sin b = ab(sinc a - sinc b), free of the small-ξ cancellation
        a * b * (sinc(a) - sinc(b)) / (delta * (a + b))
    };
    Ok(scale * ratio)
}

/// `√(2Θ/L)·(ξh²/6)·|sec(kh/2)|`.
pub fn boundary_multiplier_bound(xi: f64, h: f64, k: f64, length: f64) -> Result<f64> {
    let th = theta(k * h)?;
    let sec = 1.0 / (0.5 * k * h).cos();
    Ok((2.0 * th / length).sqrt() * xi.abs() * h * h / 6.0 * sec.abs())
}

pub fn interior_sample(xi: f64, h: f64, k: f64) -> Result<MultiplierSample> {
    Ok(MultiplierSample {
        xi,
        value: interior_multiplier(xi, h, k)?,
        bound: interior_multiplier_bound(xi, h, k)?,
    })
}

pub fn boundary_sample(xi: f64, h: f64, k: f64, length: f64) -> Result<MultiplierSample> {
    Ok(MultiplierSample {
        xi,
        value: boundary_multiplier(xi, h, k, length)?,
        bound: boundary_multiplier_bound(xi, h, k, length)?,
    })
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_frequency_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidInput(format!(
            "log grid needs 0 < lo < hi and at least two points (lo = {lo}, hi = {hi}, count = {count})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Outcome of a multiplier bound sweep at one `(k, h)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultiplierSweep {
    pub interior: Vec<MultiplierSample>,
    pub boundary: Vec<MultiplierSample>,
    /// Frequencies dropped as resonant with `k`.
    pub skipped: usize,
}

impl MultiplierSweep {
    pub fn violations(&self, rel_slack: f64) -> usize {
        self.interior
            .iter()
            .chain(&self.boundary)
            .filter(|s| !s.holds(rel_slack))
            .count()
    }
}

/// Samples both multipliers on a log grid `ξ ∈ [π/L, 10³·k]`.
pub fn multiplier_sweep(k: f64, h: f64, length: f64, count: usize) -> Result<MultiplierSweep> {
    let xs = log_frequency_grid(std::f64::consts::PI / length, 1e3 * k, count)?;
    let mut sweep = MultiplierSweep::default();
    for xi in xs {
        match interior_sample(xi, h, k) {
            Ok(s) => sweep.interior.push(s),
            Err(Error::NearResonantFrequency { .. }) => {
                sweep.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        }
        sweep.boundary.push(boundary_sample(xi, h, k, length)?);
    }
    Ok(sweep)
}
