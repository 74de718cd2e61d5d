//! Sine-modal machinery: kernel lifting, sine coefficients, the Dirichlet
//! modal solve, and the modal representation of the residuals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::multipliers::{boundary_multiplier, interior_multiplier};
use super::quadrature::simpson;
use super::residuals::{boundary_residuals, interior_residual};
use crate::error::{Error, Result};
use crate::reference::ExactSolution;
use crate::schemes::HelmholtzProblem;

/// Resonance tolerance shared by the lifting and the modal solve.
pub const MODAL_RESONANCE_TOL: f64 = 1e-8;

/// Default number of retained sine modes.
pub const DEFAULT_MODES: usize = 400;

pub const DEFAULT_QUAD_POINTS_PER_MODE: usize = 16;

/// Floor on the Simpson panel count for any single coefficient.
pub const MIN_PANELS: usize = 2048;

/// `b(x) = A cos(kx) + B sin(kx)`, solving `b'' + k²b = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelLifting {
    pub k: f64,
    pub a: Complex64,
    pub b: Complex64,
}

impl KernelLifting {
    pub fn eval(&self, x: f64) -> Complex64 {
        let (s, c) = (self.k * x).sin_cos();
        self.a * c + self.b * s
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        let (s, c) = (self.k * x).sin_cos();
        self.k * (self.b * c - self.a * s)
    }

    pub fn exact(&self) -> ExactSolution {
        let lift = *self;
        ExactSolution {
            u: std::sync::Arc::new(move |x| lift.eval(x)),
            du: std::sync::Arc::new(move |x| lift.derivative(x)),
            d2u: std::sync::Arc::new(move |x| -lift.k * lift.k * lift.eval(x)),
        }
    }
}

/// Kernel function with `b(0) = u0`, `b(L) = uL`.
pub fn kernel_lifting(u0: Complex64, ul: Complex64, k: f64, length: f64) -> Result<KernelLifting> {
    let (s, c) = (k * length).sin_cos();
    if !(s.abs() > MODAL_RESONANCE_TOL) {
        return Err(Error::ResonantWavenumber { kl: k * length });
    }
    Ok(KernelLifting {
        k,
        a: u0,
        b: (ul - u0 * c) / s,
    })
}

/// Coefficients `c_n`, `n = 1..=N`, on `φ_n(x) = √(2/L) sin(nπx/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalExpansion {
    pub length: f64,
    /// Entry `j` holds mode `n = j + 1`.
    pub coefficients: Vec<Complex64>,
}

impl ModalExpansion {
    pub fn count(&self) -> usize {
        self.coefficients.len()
    }

    /// `ξ_n = nπ/L`.
    pub fn xi(&self, n: usize) -> f64 {
        n as f64 * PI / self.length
    }

    pub fn basis(&self, n: usize, x: f64) -> f64 {
        (2.0 / self.length).sqrt() * (self.xi(n) * x).sin()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.basis(j + 1, x))
            .sum()
    }

    /// `Σ_{n ≤ m} |c_n|²` for `m = 1..=N`.
    pub fn parseval_partial_sums(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.norm_sqr();
                Some(*acc)
            })
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> ModalExpansion {
        ModalExpansion {
            length: self.length,
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        }
    }
}

/// `f̂_n = (f, φ_n)` by composite Simpson with
/// `max(quad_points_per_mode·n, MIN_PANELS)` panels for mode `n`.
pub fn sine_coefficients<F>(
    f: F,
    length: f64,
    modes: usize,
    quad_points_per_mode: usize,
) -> Result<ModalExpansion>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if modes == 0 {
        return Err(Error::InvalidInput(
            "at least one sine mode is required".into(),
        ));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!(
            "length L = {length} must be positive"
        )));
    }
    let norm = (2.0 / length).sqrt();
    let coefficients = (1..=modes)
        .into_par_iter()
        .map(|n| {
            let xi = n as f64 * PI / length;
            let panels = (quad_points_per_mode * n).max(MIN_PANELS);
            simpson(|x| f(x) * (norm * (xi * x).sin()), 0.0, length, panels)
        })
        .collect();
    Ok(ModalExpansion {
        length,
        coefficients,
    })
}

/// `ŵ_n = f̂_n / (ξ_n² - k²)`, the sine-series solution of
/// `-w'' - k²w = f` with `w(0) = w(L) = 0`.
pub fn dirichlet_modal_solution(fhat: &ModalExpansion, k: f64) -> Result<ModalExpansion> {
    let coefficients = fhat
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let xi = fhat.xi(j + 1);
            let lambda = xi * xi - k * k;
            if !(lambda.abs() > MODAL_RESONANCE_TOL * k * k) {
                return Err(Error::ModalResonance { k, mode: j + 1 });
            }
            Ok(c / lambda)
        })
        .collect::<Result<_>>()?;
    Ok(ModalExpansion {
        length: fhat.length,
        coefficients,
    })
}

/// `u = w + b` with `b` the kernel lifting of the endpoint values and `w`
/// the Dirichlet modal solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalDecomposition {
    pub w: ModalExpansion,
    pub b: KernelLifting,
}

impl ModalDecomposition {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.w.eval(x) + self.b.eval(x)
    }
}

/// Builds `u = w + b` for `u'' + k²u = f`. In this orientation `w` solves
/// `-w'' - k²w = -f`, so the modal solve is driven by the coefficients of `-f`.
pub fn modal_decomposition(
    p: &HelmholtzProblem,
    u0: Complex64,
    ul: Complex64,
    modes: usize,
    quad_points_per_mode: usize,
) -> Result<ModalDecomposition> {
    let b = kernel_lifting(u0, ul, p.k, p.length)?;
    let source = &p.source;
    let fhat = sine_coefficients(|x| source(x), p.length, modes, quad_points_per_mode)?;
    let w = dirichlet_modal_solution(&fhat.scale((-1.0).into()), p.k)?;
    Ok(ModalDecomposition { w, b })
}

/// Rough estimate of `Σ_{n>N} t_n` from the decay of the last half of the
/// computed magnitudes, assuming a power law. Infinite when the decay is
/// too slow to sum.
pub fn tail_estimate(magnitudes: &[f64]) -> f64 {
    let n = magnitudes.len();
    if n < 8 {
        return f64::INFINITY;
    }
    let window_max = |lo: usize, hi: usize| magnitudes[lo..hi].iter().cloned().fold(0.0, f64::max);
    let m1 = window_max(n / 2, 3 * n / 4);
    let m2 = window_max(3 * n / 4, n);
    if m2 == 0.0 {
        return 0.0;
    }
    // a decaying sequence peaks near the start of each window
    let (s1, s2) = ((n / 2 + 1) as f64, (3 * n / 4 + 1) as f64);
    let p = (m1 / m2).ln() / (s2 / s1).ln();
    if !(p > 1.05) {
        return f64::INFINITY;
    }
    // Σ_{m>N} C m^{-p} ≈ C N^{1-p}/(p-1) with C = m2·s2^p
    m2 * (s2 / n as f64).powf(p) * n as f64 / (p - 1.0)
}

/// Residuals reconstructed from modal sums next to their direct values.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalResidualReport {
    pub modes: usize,
    pub tau_direct: Vec<Complex64>,
    pub tau_modal: Vec<Complex64>,
    pub beta0_direct: Complex64,
    pub beta0_modal: Complex64,
    pub beta_l_direct: Complex64,
    pub beta_l_modal: Complex64,
    /// `max_i |τ_modal - τ_direct| / max_i |τ_direct|`.
    pub tau_mismatch: f64,
    pub beta0_mismatch: f64,
    pub beta_l_mismatch: f64,
    /// Estimated truncation tail of the `β₀` sum.
    pub beta_tail: f64,
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// In the orientation `u'' + k²u = f`:
/// `τ(x) = Σ M_h(ξ_n) f̂_n φ_n(x)`, `β₀ = -Σ B_h(ξ_n) f̂_n` and
/// `β_L = -Σ (-1)ⁿ B_h(ξ_n) f̂_n`. The kernel part of `u` contributes
/// nothing to any residual.
pub fn modal_residual_representation_check(
    p: &HelmholtzProblem,
    exact: &ExactSolution,
    n: usize,
    modes: usize,
) -> Result<ModalResidualReport> {
    let grid = p.grid(n)?;
    let (k, h, l) = (p.k, grid.h(), p.length);
    let tau = interior_residual(exact, k, &grid)?;
    let (beta0_direct, beta_l_direct) = boundary_residuals(exact, k, h, l)?;

    let source = &p.source;
    let fhat = sine_coefficients(|x| source(x), l, modes, DEFAULT_QUAD_POINTS_PER_MODE)?;

    let mut interior = Vec::with_capacity(modes);
    let mut boundary = Vec::with_capacity(modes);
    for m in 1..=modes {
        let xi = fhat.xi(m);
        interior.push(interior_multiplier(xi, h, k)?);
        boundary.push(boundary_multiplier(xi, h, k, l)?);
    }

    let terms: Vec<Complex64> = fhat
        .coefficients
        .iter()
        .zip(&boundary)
        .map(|(c, b)| -b * c)
        .collect();
    let beta0_modal: Complex64 = terms.iter().sum();
    let beta_l_modal: Complex64 = terms
        .iter()
        .enumerate()
        .map(|(j, t)| if (j + 1) % 2 == 0 { *t } else { -t })
        .sum();
    let beta_tail = tail_estimate(&terms.iter().map(|t| t.norm()).collect::<Vec<_>>());

    let weighted: Vec<Complex64> = fhat
        .coefficients
        .iter()
        .zip(&interior)
        .map(|(c, mh)| mh * c)
        .collect();
    let tau_modal: Vec<Complex64> = (1..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            weighted
                .iter()
                .enumerate()
                .map(|(j, w)| w * fhat.basis(j + 1, x))
                .sum()
        })
        .collect();

    let tau_scale = tau.values.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let tau_gap = tau
        .values
        .iter()
        .zip(&tau_modal)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let tau_mismatch = if tau_scale == 0.0 && tau_gap == 0.0 {
        0.0
    } else {
        tau_gap / tau_scale.max(f64::MIN_POSITIVE)
    };

    Ok(ModalResidualReport {
        modes,
        tau_direct: tau.values,
        tau_modal,
        beta0_direct,
        beta0_modal,
        beta_l_direct,
        beta_l_modal,
        tau_mismatch,
        beta0_mismatch: relative_gap(beta0_direct, beta0_modal),
        beta_l_mismatch: relative_gap(beta_l_direct, beta_l_modal),
        beta_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{plane_wave_problem, smooth_manufactured_problem};
    use crate::schemes::HelmholtzProblem;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lifting_cases() {
        let (k, l) = (3.7f64, 1.0f64);
        let b = kernel_lifting(c(1.0), c((k * l).cos()), k, l).unwrap();
        assert!(b.b.norm() < 1e-15);
        for x in [0.0, 0.3, 1.0] {
            assert!((b.eval(x) - c((k * x).cos())).norm() < 1e-14);
        }
        let z = kernel_lifting(c(0.0), c(0.0), k, l).unwrap();
        assert_eq!(z.eval(0.4), c(0.0));
        assert!(matches!(
            kernel_lifting(c(1.0), c(1.0), 3.0 * PI, 1.0),
            Err(Error::ResonantWavenumber { .. })
        ));
        let u0 = Complex64::new(0.5, -1.0);
        let ul = Complex64::new(2.0, 0.25);
        let b = kernel_lifting(u0, ul, 11.0, 2.0).unwrap();
        assert!((b.eval(0.0) - u0).norm() < 1e-14);
        assert!((b.eval(2.0) - ul).norm() < 1e-13);
    }

    #[test]
    fn coefficients_of_a_basis_function() {
        let phi3 = |x: f64| c(2f64.sqrt() * (3.0 * PI * x).sin());
        let e = sine_coefficients(phi3, 1.0, 10, 8).unwrap();
        for (j, v) in e.coefficients.iter().enumerate() {
            let expected = if j == 2 { 1.0 } else { 0.0 };
            assert!((v - c(expected)).norm() < 1e-10, "mode {}", j + 1);
        }
        let zero = sine_coefficients(|_| c(0.0), 1.0, 5, 8).unwrap();
        assert!(zero.coefficients.iter().all(|v| *v == c(0.0)));
        assert!(sine_coefficients(|_| c(1.0), 1.0, 0, 8).is_err());
    }

    /// `∫₀¹ sin²(πx)·√2 sin(nπx) dx` in closed form.
    fn sine_squared_oracle(n: usize) -> f64 {
        if n.is_multiple_of(2) {
            0.0
        } else {
            let nf = n as f64;
            -4.0 * 2f64.sqrt() / (PI * nf * (nf * nf - 4.0))
        }
    }

    #[test]
    fn sine_squared_coefficients_match_closed_form() {
        let f = |x: f64| c((PI * x).sin().powi(2));
        let e = sine_coefficients(f, 1.0, 40, DEFAULT_QUAD_POINTS_PER_MODE).unwrap();
        assert!((sine_squared_oracle(1) - 4.0 * 2f64.sqrt() / (3.0 * PI)).abs() < 1e-15);
        for (j, v) in e.coefficients.iter().enumerate() {
            assert!(
                (v - c(sine_squared_oracle(j + 1))).norm() < 1e-10,
                "mode {}",
                j + 1
            );
        }
    }

    #[test]
    fn parseval_sums_are_monotone() {
        let f = |x: f64| Complex64::new(x * (1.0 - x), (5.0 * x).cos());
        let e = sine_coefficients(f, 1.0, 50, 8).unwrap();
        let s = e.parseval_partial_sums();
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        // bounded by ‖f‖²
        let norm2 = simpson(|x| c(f(x).norm_sqr()), 0.0, 1.0, 4096).re;
        assert!(*s.last().unwrap() <= norm2 * (1.0 + 1e-12));
    }

    #[test]
    fn modal_solve_of_a_single_mode() {
        let k = 2.0;
        let xi1 = PI;
        let f = move |x: f64| c((xi1 * xi1 - k * k) * 2f64.sqrt() * (PI * x).sin());
        let fhat = sine_coefficients(f, 1.0, 6, 16).unwrap();
        let w = dirichlet_modal_solution(&fhat, k).unwrap();
        assert!((w.coefficients[0] - c(1.0)).norm() < 1e-10);
        for x in [0.1, 0.5, 0.77] {
            assert!((w.eval(x) - c(2f64.sqrt() * (PI * x).sin())).norm() < 1e-9);
        }
        assert!(w.eval(0.0).norm() < 1e-10 && w.eval(1.0).norm() < 1e-10);
    }

    #[test]
    fn modal_resonance_detected() {
        let fhat = ModalExpansion {
            length: 1.0,
            coefficients: vec![c(1.0); 8],
        };
        assert!(matches!(
            dirichlet_modal_solution(&fhat, 5.0 * PI),
            Err(Error::ModalResonance { mode: 5, .. })
        ));
    }

    #[test]
    fn decomposition_reproduces_smooth_solution() {
        let (p, exact) = smooth_manufactured_problem(32.0).unwrap();
        let u0 = (exact.u)(0.0);
        let ul = (exact.u)(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for modes in [200, 400] {
            let d = modal_decomposition(&p, u0, ul, modes, DEFAULT_QUAD_POINTS_PER_MODE).unwrap();
            for _ in 0..50 {
                let x = rng.gen_range(0.0..1.0);
                let gap = (d.eval(x) - (exact.u)(x)).norm();
                assert!(gap < 1e-6, "N = {modes}, x = {x}: {gap}");
            }
        }
    }

    #[test]
    fn modal_residuals_converge_to_direct_values() {
        // β₀ = O(h³) here, so the truncated sum only settles once N is well
        // past the grid size; the tail estimate flags the short expansion.
        let (p, exact) = smooth_manufactured_problem(32.0).unwrap();
        let short = modal_residual_representation_check(&p, &exact, 729, DEFAULT_MODES).unwrap();
        let gap = (short.beta0_modal - short.beta0_direct).norm();
        assert!(short.beta_tail >= 0.01 * short.beta0_direct.norm());
        assert!(gap <= 2.0 * short.beta_tail, "{gap} vs {}", short.beta_tail);

        let long = modal_residual_representation_check(&p, &exact, 729, 1600).unwrap();
        assert!(long.beta0_mismatch < 0.02, "{}", long.beta0_mismatch);
        assert!(long.beta_l_mismatch < 0.02, "{}", long.beta_l_mismatch);
        assert!(long.tau_mismatch < 0.01, "{}", long.tau_mismatch);
        assert!(long.beta0_mismatch < short.beta0_mismatch / 10.0);
        assert!(long.beta_tail < 0.1 * long.beta0_direct.norm());
    }

    #[test]
    fn kernel_data_has_no_residual() {
        let (p, exact) = plane_wave_problem(20.0, c(1.0), Complex64::new(0.0, 2.0), 1.0).unwrap();
        let r = modal_residual_representation_check(&p, &exact, 64, 50).unwrap();
        assert!(r.beta0_direct.norm() + r.beta_l_direct.norm() <= 1e-12 * 20.0 * 64.0);
        assert!(r.beta0_modal.norm() + r.beta_l_modal.norm() <= 1e-12);
        assert!(r.tau_modal.iter().all(|t| t.norm() <= 1e-12));

        let zero =
            HelmholtzProblem::new("zero", 20.0, 1.0, Arc::new(|_| c(0.0)), c(0.0), c(0.0)).unwrap();
        let exact0 = kernel_lifting(c(0.0), c(0.0), 20.0, 1.0).unwrap().exact();
        let r = modal_residual_representation_check(&zero, &exact0, 64, 50).unwrap();
        assert_eq!(r.beta0_direct, c(0.0));
        assert_eq!(r.beta0_modal, c(0.0));
        assert_eq!(r.tau_mismatch, 0.0);
    }

    #[test]
    fn tail_estimate_of_a_power_law() {
        let t: Vec<f64> = (1..=400).map(|n| (n as f64).powi(-4)).collect();
        let exact: f64 = (401..200_000).map(|n| (n as f64).powi(-4)).sum();
        let est = tail_estimate(&t);
        assert!(est > 0.5 * exact && est < 2.0 * exact, "{est} vs {exact}");
        assert!(tail_estimate(&vec![1.0; 100]).is_infinite());
    }
}
