//! Named batteries of invariant checks, each reporting one line per check.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::multipliers::multiplier_sweep;
use super::residuals::{convergence_bound, error_equation_check, residual_report};
use super::stability::{
    energy_identity, flux_energy, flux_energy_rhs, flux_estimate_check, stability_bound_check,
};
use crate::error::{Error, Result};
use crate::grid::{make_grid, GridFunction};
use crate::numerics::{bernoulli, envelope_derivative_sup, phase_factor_m, theta, Envelope};
use crate::reference::{smooth_manufactured_problem, Benchmark};
use crate::schemes::{
    apply_composed_interior, apply_one_way_minus, apply_one_way_plus, solve_scheme, SchemeKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Identities,
    Multipliers,
    Residuals,
    Stability,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Identities,
        Suite::Multipliers,
        Suite::Residuals,
        Suite::Stability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Multipliers => "multipliers",
            Suite::Residuals => "residuals",
            Suite::Stability => "stability",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Worst observed value of a check against its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst measured quantity (a relative defect, a ratio or a count).
    pub measured: f64,
    pub threshold: f64,
    /// Number of individual cases evaluated.
    pub cases: usize,
}

impl CheckOutcome {
    /// Passes when `measured ≤ threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64, cases: usize) -> Self {
        Self {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
            cases,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Identities => identity_checks(seed)?,
        Suite::Multipliers => multiplier_checks(seed)?,
        Suite::Residuals => residual_checks()?,
        Suite::Stability => stability_checks()?,
    };
    Ok(SuiteReport {
        suite,
        seed,
        checks,
    })
}

fn random_complex(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-radius..radius),
        rng.gen_range(-radius..radius),
    )
}

/// A point of the box `|Re z|, |Im z| ≤ 20`, or with probability one half a
/// point of log-uniform modulus in `[1e-8, 1]` to exercise the series branch.
fn random_bernoulli_argument(rng: &mut ChaCha8Rng) -> Complex64 {
    if rng.gen_bool(0.5) {
        random_complex(rng, 20.0)
    } else {
        let r = 10f64.powf(rng.gen_range(-8.0..0.0));
        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    }
}

/// Largest relative defect of `B(-z) = e^z B(z)` and `B(-z) - B(z) = z`
/// over `samples` random arguments.
pub fn bernoulli_identity_defect(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let z = random_bernoulli_argument(&mut rng);
        let (bp, bm) = (bernoulli(z), bernoulli(-z));
        let shifted = z.exp() * bp;
        let d1 = (bm - shifted).norm() / bm.norm().max(shifted.norm());
        let d2 = (bm - bp - z).norm() / z.norm().max(bp.norm()).max(bm.norm());
        worst = (worst.0.max(d1), worst.1.max(d2));
    }
    worst
}

fn random_grid_function(rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let n = rng.gen_range(2..=200);
    let length = rng.gen_range(0.5..3.0);
    let grid = make_grid(length, n)?;
    let values = (0..=n).map(|_| random_complex(rng, 1.0)).collect();
    GridFunction::new(grid, values)
}

/// `k` with `kh` uniform in `[0.05, 3.0]` on the grid of `u`.
fn random_wavenumber(rng: &mut ChaCha8Rng, u: &GridFunction) -> f64 {
    rng.gen_range(0.05..3.0) / u.grid().h()
}

/// Largest relative defect of `D⁻D⁺u = Θ·Δ_h u + k²u` at interior nodes.
pub fn factorization_defect(u: &GridFunction, k: f64) -> Result<f64> {
    let h = u.grid().h();
    let th = theta(k * h)?;
    let composed = apply_composed_interior(u, k)?;
    let v = u.values();
    let mut worst = 0.0f64;
    for (j, d) in composed.iter().enumerate() {
        let i = j + 1;
        let three = th / (h * h) * (v[i + 1] - 2.0 * v[i] + v[i - 1]) + k * k * v[i];
        let scale = th / (h * h) * (v[i + 1].norm() + 2.0 * v[i].norm() + v[i - 1].norm())
            + k * k * v[i].norm();
        worst = worst.max((d - three).norm() / scale);
    }
    Ok(worst)
}

/// Largest relative defect of `D⁺u₀/m = (k/sin kh)(u₁ - e^{ikh}u₀)` and
/// `D⁻u_n/m = (k/sin kh)(e^{ikh}u_n - u_{n-1})`.
pub fn boundary_rewrite_defect(u: &GridFunction, k: f64) -> Result<f64> {
    let h = u.grid().h();
    let s = k * h;
    let m = phase_factor_m(s);
    let kappa = k / s.sin();
    let phase = Complex64::from_polar(1.0, s);
    let v = u.values();
    let n = v.len() - 1;
    let plus = apply_one_way_plus(u, k)?[0] / m;
    let minus = apply_one_way_minus(u, k)?[n - 1] / m;
    let left = kappa * (v[1] - phase * v[0]);
    let right = kappa * (phase * v[n] - v[n - 1]);
    let scale_l = kappa.abs() * (v[1].norm() + v[0].norm());
    let scale_r = kappa.abs() * (v[n].norm() + v[n - 1].norm());
    Ok(((plus - left).norm() / scale_l).max((minus - right).norm() / scale_r))
}

/// Identity battery; `cases` random draws for each randomized family.
pub fn identity_checks_with(
    seed: u64,
    bernoulli_samples: usize,
    cases: usize,
) -> Result<Vec<CheckOutcome>> {
    let (d_shift, d_diff) = bernoulli_identity_defect(bernoulli_samples, seed);
    let mut out = vec![
        CheckOutcome::at_most("bernoulli_shift", d_shift, 1e-12, bernoulli_samples),
        CheckOutcome::at_most("bernoulli_difference", d_diff, 1e-12, bernoulli_samples),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let (mut fact, mut bc, mut flux) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let u = random_grid_function(&mut rng)?;
        let k = random_wavenumber(&mut rng, &u);
        fact = fact.max(factorization_defect(&u, k)?);
        bc = bc.max(boundary_rewrite_defect(&u, k)?);
        let lhs = flux_energy(&u, k)?;
        let rhs = flux_energy_rhs(&u, k)?;
        flux = flux.max((lhs - rhs).abs() / lhs.max(rhs.abs()));
    }
    out.push(CheckOutcome::at_most("factorization", fact, 1e-12, cases));
    out.push(CheckOutcome::at_most("boundary_rewrite", bc, 1e-12, cases));
    out.push(CheckOutcome::at_most("flux_energy", flux, 1e-12, cases));

    let mut energy = 0.0f64;
    let mut solves = 0;
    for benchmark in [Benchmark::Smooth, Benchmark::Box, Benchmark::SineSquared] {
        for _ in 0..(cases / 10).max(1) {
            let k = rng.gen_range(4.0..200.0);
            let (p, _) = benchmark.build(k)?;
            let p = p.with_impedance_data(0.0.into(), 0.0.into());
            let n = rng.gen_range(16..=1024usize);
            let u = match solve_scheme(&p, n, SchemeKind::Bpf) {
                Ok(s) => s.solution,
                Err(e) if e.is_numerical_guard() => continue,
                Err(e) => return Err(e),
            };
            let (e, scale) = energy_identity(&p, &u)?;
            energy = energy.max(e.relative_defect(scale));
            solves += 1;
        }
    }
    out.push(CheckOutcome::at_most(
        "energy_identity",
        energy,
        1e-10,
        solves,
    ));

    for (name, env) in [("envelope_g", Envelope::G), ("envelope_h", Envelope::H)] {
        let sup = envelope_derivative_sup(env, 100_000)?;
        out.push(CheckOutcome::at_most(
            name,
            sup,
            env.derivative_bound() + 1e-6,
            100_000,
        ));
    }
    Ok(out)
}

fn identity_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    identity_checks_with(seed, 10_000, 200)
}

/// `pairs` random `(k, h)` with `kh ∈ (0.1, 3.0)`, `count` frequencies each.
pub fn multiplier_checks_with(seed: u64, pairs: usize, count: usize) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut interior, mut boundary, mut samples) = (0usize, 0usize, 0usize);
    for _ in 0..pairs {
        let k = 2f64.powf(rng.gen_range(2.0..10.0));
        let kh = rng.gen_range(0.1..3.0);
        let sweep = multiplier_sweep(k, kh / k, 1.0, count)?;
        interior += sweep.interior.iter().filter(|s| !s.holds(1e-10)).count();
        boundary += sweep.boundary.iter().filter(|s| !s.holds(1e-10)).count();
        samples += sweep.interior.len();
    }
    Ok(vec![
        CheckOutcome::at_most("interior_multiplier_bound", interior as f64, 0.0, samples),
        CheckOutcome::at_most("boundary_multiplier_bound", boundary as f64, 0.0, samples),
    ])
}

fn multiplier_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    multiplier_checks_with(seed, 20, 1000)
}

/// Residual, error-equation and convergence bounds on the smooth benchmark
/// over `k ∈ {2⁴..2⁸}`, `n ∈ {3⁵..3⁸}` with `kh < π`.
pub fn residual_checks() -> Result<Vec<CheckOutcome>> {
    let (mut tau, mut beta, mut eq, mut conv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    for ke in 4..=8 {
        let k = 2f64.powi(ke);
        let (p, exact) = smooth_manufactured_problem(k)?;
        for ne in 5..=8 {
            let n = 3usize.pow(ne);
            if !(k / n as f64 * p.length < std::f64::consts::PI) {
                continue;
            }
            let r = residual_report(&p, &exact, n)?;
            tau = tau.max(r.tau_norm / r.tau_bound);
            beta = beta.max((r.beta0.norm() + r.beta_l.norm()) / r.beta_bound);
            let check = error_equation_check(&p, &exact, n)?;
            // defect beyond the rounding floor, relative to the residual size
            let excess = (check.defect - 100.0 * check.roundoff_floor).max(0.0);
            eq = eq.max(excess / check.residual_scale);
            let bound = convergence_bound(&p, n)?;
            conv = conv.max(k * check.error.norm_l2h() / bound);
            cases += 1;
        }
    }
    Ok(vec![
        CheckOutcome::at_most("tau_bound_ratio", tau, 1.0, cases),
        CheckOutcome::at_most("beta_bound_ratio", beta, 1.0, cases),
        CheckOutcome::at_most("error_equation", eq, 1e-9, cases),
        CheckOutcome::at_most("convergence_bound_ratio", conv, 1.0, cases),
    ])
}

/// Stability, flux and auxiliary bounds over all benchmarks,
/// `k ∈ {2⁵..2⁸}`, `n ∈ {2⁷..2¹⁰}`. Reported as worst `lhs/rhs`.
pub fn stability_checks() -> Result<Vec<CheckOutcome>> {
    let (mut l2, mut h1, mut flux, mut aux) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    let ratio = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
    for benchmark in Benchmark::ALL {
        for ke in 5..=8 {
            let (p, _) = benchmark.build(2f64.powi(ke))?;
            let hom = p.with_impedance_data(0.0.into(), 0.0.into());
            for ne in 7..=10 {
                let n = 1usize << ne;
                let u = solve_scheme(&p, n, SchemeKind::Bpf)?.solution;
                let r = stability_bound_check(&p, &u)?;
                l2 = l2.max(ratio(r.l2_lhs, r.rhs));
                h1 = h1.max(ratio(r.h1_lhs, r.rhs));
                let w = solve_scheme(&hom, n, SchemeKind::Bpf)?.solution;
                let f = flux_estimate_check(&hom, &w)?;
                flux = flux.max(ratio(f.flux_lhs, f.flux_rhs));
                aux = aux.max(ratio(f.auxiliary_lhs, f.auxiliary_rhs));
                cases += 1;
            }
        }
    }
    let limit = 1.0 + super::stability::INEQUALITY_SLACK;
    Ok(vec![
        CheckOutcome::at_most("stability_l2_ratio", l2, limit, cases),
        CheckOutcome::at_most("stability_h1_ratio", h1, limit, cases),
        CheckOutcome::at_most("flux_estimate_ratio", flux, limit, cases),
        CheckOutcome::at_most("auxiliary_bound_ratio", aux, limit, cases),
    ])
}
