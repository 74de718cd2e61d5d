//! Scalar special functions and wavenumber-dependent constants.
//!
//! Everything here is a pure function of real or complex scalars. The
//! Bernoulli function `B(z) = z / (e^z - 1)` is the building block of the
//! complexified Scharfetter-Gummel one-way operators; the remaining
//! functions are closed forms derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default guard tolerance, measured as a fraction of π.
pub const DEFAULT_GUARD_TOL: f64 = 1e-8;

/// Below this modulus `bernoulli` switches to its Taylor series.
pub const BERNOULLI_SERIES_THRESHOLD: f64 = 1e-3;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// Bernoulli function `B(z) = z / (e^z - 1)` with `B(0) = 1`.
pub fn bernoulli(z: Complex64) -> Complex64 {
    if z.norm() < BERNOULLI_SERIES_THRESHOLD {
        let z2 = z * z;
        return 1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0;
    }
    z / expm1_complex(z)
}

/// Series branch of [`bernoulli`], exposed so the crossover can be checked.
pub fn bernoulli_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0
}

/// Closed-form branch of [`bernoulli`]. Undefined at `z = 0`.
pub fn bernoulli_closed(z: Complex64) -> Complex64 {
    z / expm1_complex(z)
}

/// Distance from `x` to the lattice `period·ℤ`, with the nearest multiple.
fn lattice_distance(x: f64, period: f64) -> (f64, f64) {
    let m = (x / period).round();
    ((x - m * period).abs(), m)
}

/// Phase-fitted weight `Θ(s) = |B(is)|² = s² / (4 sin²(s/2))`, `Θ(0) = 1`.
pub fn theta(s: f64) -> Result<f64> {
    theta_with_tol(s, DEFAULT_GUARD_TOL)
}

pub fn theta_with_tol(s: f64, tol: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::InvalidInput(format!(
            "theta argument {s} is not finite"
        )));
    }
    let (dist, m) = lattice_distance(s, 2.0 * PI);
    if m != 0.0 && dist / PI <= tol {
        return Err(Error::SingularParameter {
            s,
            singular_at: m * 2.0 * PI,
        });
    }
    if s.abs() < 1e-6 {
        let s2 = s * s;
        return Ok(1.0 + s2 / 12.0 + s2 * s2 / 240.0);
    }
    let half = (0.5 * s).sin();
    Ok(s * s / (4.0 * half * half))
}

/// Boundary correction factor `m(s) = e^{-is/2} cos(s/2)`.
pub fn phase_factor_m(s: f64) -> Complex64 {
    Complex64::from_polar((0.5 * s).cos(), -0.5 * s)
}

/// Shifted wavenumber `k̂ = k / √Θ(kh) = (2/h)|sin(kh/2)|`.
pub fn shifted_wavenumber(k: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "grid spacing h = {h} must be positive"
        )));
    }
    theta(k * h)?;
    Ok(2.0 / h * (0.5 * k * h).sin().abs())
}

/// Stability constant
/// `A₀(s, t) = L/√(2Θ(s))·|sec(s/2)| + L/(2t)·sec²(s/2)`.
///
/// The absolute value on the secant only matters for `s > π`, where the
/// signed formula would go negative.
pub fn stability_constant_a0(s: f64, t: f64, length: f64) -> Result<f64> {
    stability_constant_a0_with_tol(s, t, length, DEFAULT_GUARD_TOL)
}

pub fn stability_constant_a0_with_tol(s: f64, t: f64, length: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0) || !(length > 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "A0 requires s >= 0, t > 0, L > 0 (got s = {s}, t = {t}, L = {length})"
        )));
    }
    // sec(s/2) blows up at odd multiples of π
    let (dist, m) = lattice_distance(s - PI, 2.0 * PI);
    if dist / PI <= tol {
        return Err(Error::SingularParameter {
            s,
            singular_at: (2.0 * m + 1.0) * PI,
        });
    }
    let theta = theta_with_tol(s, tol)?;
    let sec = 1.0 / (0.5 * s).cos();
    Ok(length / (2.0 * theta).sqrt() * sec.abs() + length / (2.0 * t) * sec * sec)
}

/// Rejects `kh` within `tol·π` of `π·ℤ`.
pub fn nyquist_guard(k: f64, h: f64, tol: f64) -> Result<()> {
    let kh = k * h;
    let (dist, m) = lattice_distance(kh, PI);
    if !(dist / PI > tol) {
        return Err(Error::NearNyquist {
            kh,
            multiple: m as i64,
        });
    }
    Ok(())
}

/// Wavenumber, length and spacing bundled with `s = kh` and `t = kL`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    pub k: f64,
    pub length: f64,
    pub h: f64,
    pub s: f64,
    pub t: f64,
}

impl WaveParameters {
    pub fn new(k: f64, length: f64, h: f64, tol: f64) -> Result<Self> {
        if !(k > 0.0) || !(length > 0.0) || !(h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "wave parameters must be positive (k = {k}, L = {length}, h = {h})"
            )));
        }
        nyquist_guard(k, h, tol)?;
        Ok(Self {
            k,
            length,
            h,
            s: k * h,
            t: k * length,
        })
    }

    pub fn theta(&self) -> f64 {
        // s is off π·ℤ, hence off 2π·ℤ \ {0}
        theta_with_tol(self.s, 0.0).expect("guarded at construction")
    }
}

/// The two envelope functions whose derivative bounds drive the
/// multiplier estimates: `g(t) = sin²(√t)/t` and `h(t) = sin(√t)/√t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    G,
    H,
}

impl Envelope {
    pub fn value(self, t: f64) -> f64 {
        let r = t.sqrt();
        let sinc = if r < 1e-8 { 1.0 - t / 6.0 } else { r.sin() / r };
        match self {
            Envelope::G => sinc * sinc,
            Envelope::H => sinc,
        }
    }

    /// Central-difference derivative with step `1e-6·max(t, 1)`, capped at `t/2`.
    pub fn derivative(self, t: f64) -> f64 {
        let step = (1e-6 * t.max(1.0)).min(0.5 * t);
        (self.value(t + step) - self.value(t - step)) / (2.0 * step)
    }

    /// Proven bound on `sup |env'|`.
    pub fn derivative_bound(self) -> f64 {
        match self {
            Envelope::G => 1.0 / 3.0,
            Envelope::H => 1.0 / 6.0,
        }
    }
}

/// Largest `|env'(t)|` over `samples` log-spaced points of `t ∈ [1e-6, 1e4]`.
pub fn envelope_derivative_sup(which: Envelope, samples: usize) -> Result<f64> {
    if samples < 1000 {
        return Err(Error::InvalidInput(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    let (lo, hi) = (1e-6f64.ln(), 1e4f64.ln());
    let sup = (0..samples)
        .map(|j| {
            let t = (lo + (hi - lo) * j as f64 / (samples - 1) as f64).exp();
            which.derivative(t).abs()
        })
        .fold(0.0, f64::max);
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn bernoulli_values() {
        assert_eq!(
            bernoulli(Complex64::new(0.0, 0.0)),
            Complex64::new(1.0, 0.0)
        );
        let b1 = bernoulli(Complex64::new(1.0, 0.0));
        assert!((b1.re - 0.581_976_706_869_326_4).abs() < 1e-15);
        assert!(b1.im.abs() < 1e-16);
        let z = PI * I;
        let diff = bernoulli(-z) - bernoulli(z);
        assert!((diff - z).norm() < 1e-13);
    }

    #[test]
    fn bernoulli_branch_crossover_is_continuous() {
        for angle in [0.0, 0.7, std::f64::consts::FRAC_PI_2, 2.2, PI, 4.0, 5.5] {
            let z = Complex64::from_polar(BERNOULLI_SERIES_THRESHOLD, angle);
            let a = bernoulli_series(z);
            let b = bernoulli_closed(z);
            assert!(
                (a - b).norm() / a.norm() < 1e-14,
                "angle {angle}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(0.0).unwrap(), 1.0);
        assert!((theta(PI).unwrap() - PI * PI / 4.0).abs() < 1e-14);
        assert!((theta(PI / 2.0).unwrap() - PI * PI / 8.0).abs() < 1e-14);
        assert!(matches!(
            theta(2.0 * PI),
            Err(Error::SingularParameter { .. })
        ));
        assert!(matches!(
            theta(-4.0 * PI + 1e-12),
            Err(Error::SingularParameter { .. })
        ));
    }

    #[test]
    fn theta_matches_bernoulli_modulus() {
        for j in 1..2000 {
            let s = 2.0 * PI * j as f64 / 2000.0;
            let b = bernoulli(s * I).norm_sqr();
            let t = theta(s).unwrap();
            assert!((b - t).abs() / t < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn theta_range_on_principal_band() {
        for j in 0..=1000 {
            let s = PI * j as f64 / 1000.0;
            let t = theta(s).unwrap();
            assert!((1.0..=PI * PI / 4.0 + 1e-15).contains(&t));
        }
    }

    #[test]
    fn phase_factor_values() {
        assert!((phase_factor_m(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-16);
        assert!(phase_factor_m(PI).norm() < 1e-16);
        let expected = Complex64::from_polar(0.5f64.sqrt(), -PI / 4.0);
        assert!((phase_factor_m(PI / 2.0) - expected).norm() < 1e-16);
    }

    #[test]
    fn key_identity_bernoulli_over_m() {
        for j in 1..1000 {
            let s = PI * j as f64 / 1000.0;
            let ratio = bernoulli(s * I) / phase_factor_m(s);
            let expected = s / s.sin();
            assert!((ratio - expected).norm() / expected < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn shifted_wavenumber_values() {
        assert!((shifted_wavenumber(PI, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((shifted_wavenumber(3.0, 1e-9).unwrap() - 3.0).abs() < 1e-12);
        for (k, h) in [(10.0, 0.01), (100.0, 0.02), (7.0, 0.8), (50.0, 0.1)] {
            let khat = shifted_wavenumber(k, h).unwrap();
            assert!((khat * theta(k * h).unwrap().sqrt() - k).abs() / k < 1e-13);
            if k * h < PI {
                assert!(khat < k);
            }
        }
        assert!(shifted_wavenumber(2.0 * PI, 1.0).is_err());
    }

    #[test]
    fn a0_values_and_monotonicity() {
        let a = stability_constant_a0(1e-9, 5.0, 2.0).unwrap();
        assert!((a - (2.0 / 2f64.sqrt() + 2.0 / 10.0)).abs() < 1e-12);

        let sec = 1.0 / (PI / 4.0).cos();
        let expected = 1.0 / (2.0 * PI * PI / 8.0).sqrt() * sec + 1.0 / (2.0 * PI) * sec * sec;
        assert!((stability_constant_a0(PI / 2.0, PI, 1.0).unwrap() - expected).abs() < 1e-14);

        let mut prev = 0.0;
        for j in 1..1000 {
            let s = PI * j as f64 / 1000.0;
            let a = stability_constant_a0(s, 7.0, 1.0).unwrap();
            assert!(a > prev);
            prev = a;
        }
        assert!(matches!(
            stability_constant_a0(PI, 4.0, 1.0),
            Err(Error::SingularParameter { .. })
        ));
        assert!(stability_constant_a0(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn a0_bounded_under_fixed_resolution() {
        let s0 = 2.5;
        let cap = stability_constant_a0(s0, PI, 1.0).unwrap();
        for j in 1..=50 {
            let s = s0 * j as f64 / 50.0;
            for t in [PI, 5.0, 50.0, 1e3] {
                assert!(stability_constant_a0(s, t, 1.0).unwrap() <= cap * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn nyquist_guard_cases() {
        assert!(nyquist_guard(128.0, 0.125, DEFAULT_GUARD_TOL).is_ok());
        assert_eq!(
            nyquist_guard(PI, 1.0, DEFAULT_GUARD_TOL),
            Err(Error::NearNyquist {
                kh: PI,
                multiple: 1
            })
        );
        let err = nyquist_guard(3.0 * PI + 1e-12, 1.0, DEFAULT_GUARD_TOL).unwrap_err();
        assert!(matches!(err, Error::NearNyquist { multiple: 3, .. }));
    }

    #[test]
    fn envelope_sup_bounds() {
        let g = envelope_derivative_sup(Envelope::G, 100_000).unwrap();
        let h = envelope_derivative_sup(Envelope::H, 100_000).unwrap();
        assert!(g <= 1.0 / 3.0 + 1e-6, "sup|g'| = {g}");
        assert!(h <= 1.0 / 6.0 + 1e-6, "sup|h'| = {h}");
        // sup is attained as t -> 0+
        assert!(g > 0.333);
        assert!(h > 0.166);
        assert!(envelope_derivative_sup(Envelope::G, 10).is_err());
    }

    #[test]
    fn envelope_g_slope_at_origin() {
        // g(t) = 1 - t/3 + 2t²/45 - ...
        for t in [1e-4, 1e-3, 1e-2] {
            let series = -1.0 / 3.0 + 4.0 * t / 45.0;
            assert!((Envelope::G.derivative(t) - series).abs() < 1e-5, "t = {t}");
        }
    }
}
