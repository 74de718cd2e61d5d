//! Discretizations of `u'' + k²u = f` on `(0, L)` with impedance data
//! `u'(0) - iku(0) = g0`, `u'(L) + iku(L) = gL`.
//!
//! Three schemes share the [`TridiagonalSystem`] layout:
//!
//! * **BPF**: the composition `D⁻D⁺` of the complexified
//!   Scharfetter-Gummel one-way operators. Interior rows are
//!   `Θ(kh)·Δ_h u + k²u = f`; the boundary rows are the exact discrete
//!   impedance closures `(k/sin kh)(u_1 - e^{ikh}u_0) = g0` and
//!   `(k/sin kh)(e^{ikh}u_n - u_{n-1}) = gL`.
//! * **Classical FD**: `Δ_h u + k²u = f` with a ghost-point, second-order
//!   impedance closure.
//! * **Dispersion-corrected FD**: the classical stencil with `k` replaced
//!   by the shifted wavenumber `k̂ = (2/h) sin(kh/2)` in the interior.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{sample, GridFunction, UniformGrid};
use crate::numerics::{
    bernoulli, nyquist_guard, shifted_wavenumber, theta_with_tol, DEFAULT_GUARD_TOL,
};
use crate::trisolve::{residual_inf_norm, solve_tridiagonal, TridiagonalSystem};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex-valued function of position.
pub type ScalarFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Cache identity of a problem: benchmark name, `k` and `L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemId {
    pub name: String,
    k_bits: u64,
    length_bits: u64,
}

impl ProblemId {
    pub fn new(name: impl Into<String>, k: f64, length: f64) -> Self {
        Self {
            name: name.into(),
            k_bits: k.to_bits(),
            length_bits: length.to_bits(),
        }
    }
}

/// Analytic second and third derivatives of the source.
#[derive(Clone)]
pub struct SourceDerivatives {
    pub second: ScalarFn,
    pub third: ScalarFn,
}

#[derive(Clone)]
pub struct HelmholtzProblem {
    pub k: f64,
    pub length: f64,
    pub source: ScalarFn,
    pub g0: Complex64,
    pub gl: Complex64,
    pub id: ProblemId,
    pub source_derivatives: Option<SourceDerivatives>,
    /// Guard tolerance (fraction of π) applied to `kh` at assembly.
    pub nyquist_tol: f64,
}

impl fmt::Debug for HelmholtzProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HelmholtzProblem")
            .field("id", &self.id.name)
            .field("k", &self.k)
            .field("length", &self.length)
            .field("g0", &self.g0)
            .field("gl", &self.gl)
            .finish_non_exhaustive()
    }
}

impl HelmholtzProblem {
    pub fn new(
        name: impl Into<String>,
        k: f64,
        length: f64,
        source: ScalarFn,
        g0: Complex64,
        gl: Complex64,
    ) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidInput(format!(
                "wavenumber k = {k} must be positive"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidInput(format!(
                "length L = {length} must be positive"
            )));
        }
        if !g0.is_finite() || !gl.is_finite() {
            return Err(Error::InvalidInput("impedance data must be finite".into()));
        }
        Ok(Self {
            k,
            length,
            source,
            g0,
            gl,
            id: ProblemId::new(name, k, length),
            source_derivatives: None,
            nyquist_tol: DEFAULT_GUARD_TOL,
        })
    }

    pub fn with_source_derivatives(mut self, derivatives: SourceDerivatives) -> Self {
        self.source_derivatives = Some(derivatives);
        self
    }

    pub fn with_nyquist_tol(mut self, tol: f64) -> Self {
        self.nyquist_tol = tol;
        self
    }

    /// Same source and wavenumber, different impedance data.
    pub fn with_impedance_data(&self, g0: Complex64, gl: Complex64) -> Self {
        let mut p = self.clone();
        p.g0 = g0;
        p.gl = gl;
        p.id.name = format!("{}[g0={g0},gL={gl}]", self.id.name);
        p
    }

    pub fn grid(&self, n: usize) -> Result<UniformGrid> {
        UniformGrid::new(self.length, n)
    }

    pub fn sample_source(&self, grid: &UniformGrid) -> Result<GridFunction> {
        let f = &self.source;
        sample(|x| f(x), grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Bpf,
    ClassicalFd,
    DispersionCorrectedFd,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [
        SchemeKind::Bpf,
        SchemeKind::ClassicalFd,
        SchemeKind::DispersionCorrectedFd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Bpf => "bpf",
            SchemeKind::ClassicalFd => "fd",
            SchemeKind::DispersionCorrectedFd => "fd-dc",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bpf" => Ok(SchemeKind::Bpf),
            "fd" => Ok(SchemeKind::ClassicalFd),
            "fd-dc" => Ok(SchemeKind::DispersionCorrectedFd),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }
}

/// `B(ikh)` and `B(-ikh)`, after checking `kh ∉ 2π·ℤ \ {0}`.
fn one_way_weights(k: f64, h: f64) -> Result<(Complex64, Complex64)> {
    theta_with_tol(k * h, DEFAULT_GUARD_TOL)?;
    let z = I * (k * h);
    Ok((bernoulli(z), bernoulli(-z)))
}

/// `(D⁺v)_i = (B(ikh)v_{i+1} - B(-ikh)v_i)/h` for `i = 0..n-1`.
pub fn apply_one_way_plus(v: &GridFunction, k: f64) -> Result<Vec<Complex64>> {
    let h = v.grid().h();
    let (bp, bm) = one_way_weights(k, h)?;
    Ok(v.values()
        .windows(2)
        .map(|w| (bp * w[1] - bm * w[0]) / h)
        .collect())
}

/// `(D⁻v)_i = (B(-ikh)v_i - B(ikh)v_{i-1})/h` for `i = 1..n`; entry `j`
/// of the result holds index `i = j + 1`.
pub fn apply_one_way_minus(v: &GridFunction, k: f64) -> Result<Vec<Complex64>> {
    let h = v.grid().h();
    let (bp, bm) = one_way_weights(k, h)?;
    Ok(v.values()
        .windows(2)
        .map(|w| (bm * w[1] - bp * w[0]) / h)
        .collect())
}

/// `(D⁻D⁺v)_i` at interior nodes `i = 1..n-1`, evaluated by composition.
pub fn apply_composed_interior(v: &GridFunction, k: f64) -> Result<Vec<Complex64>> {
    let h = v.grid().h();
    let (bp, bm) = one_way_weights(k, h)?;
    let flux = apply_one_way_plus(v, k)?;
    Ok(flux
        .windows(2)
        .map(|w| (bm * w[1] - bp * w[0]) / h)
        .collect())
}

/// Row coefficients shared by assembly and the defect used for refinement.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    /// Off-diagonal interior weight: `Θ/h²` or `1/h²`.
    c: f64,
    /// Interior zeroth-order coefficient.
    k2: f64,
    /// `k2 - 4c`, formed without cancellation where that matters.
    k2_minus_4c: f64,
    /// `cos(kh) < 0`: neighbouring values nearly cancel, so the defect is
    /// formed from sums of neighbours instead of differences.
    alternating: bool,
    closure: Closure,
}

#[derive(Debug, Clone, Copy)]
enum Closure {
    /// `κ(u_1 - e^{is}u_0)`, with `e^{is} ∓ 1` kept separately.
    Bpf {
        kappa: f64,
        phase: Complex64,
        em1: Complex64,
        ep1: Complex64,
    },
    /// `(2/h²)(u_1 - u_0) + (k² - 2ik/h)u_0` after ghost elimination.
    Ghost { k2: f64, damping: f64 },
}

fn stencil(p: &HelmholtzProblem, h: f64, kind: SchemeKind) -> Result<Stencil> {
    let k = p.k;
    let s = k * h;
    let ghost = Closure::Ghost {
        k2: k * k,
        damping: 2.0 * k / h,
    };
    // for the phase-fitted stencils k2 = c(2 - 2cos s), so k2 - 4c = -4c cos²(s/2)
    let fitted = |c: f64, k2: f64, closure| {
        let half_cos = (0.5 * s).cos();
        Stencil {
            c,
            k2,
            k2_minus_4c: -4.0 * c * half_cos * half_cos,
            alternating: s.cos() < 0.0,
            closure,
        }
    };
    match kind {
        SchemeKind::Bpf => {
            nyquist_guard(k, h, p.nyquist_tol)?;
            let (half_sin, half_cos) = (0.5 * s).sin_cos();
            let half_phase = Complex64::from_polar(1.0, 0.5 * s);
            Ok(fitted(
                theta_with_tol(s, 0.0)? / (h * h),
                k * k,
                Closure::Bpf {
                    kappa: k / s.sin(),
                    phase: Complex64::from_polar(1.0, s),
                    em1: 2.0 * half_sin * I * half_phase,
                    ep1: 2.0 * half_cos * half_phase,
                },
            ))
        }
        SchemeKind::ClassicalFd => Ok(Stencil {
            c: 1.0 / (h * h),
            k2: k * k,
            k2_minus_4c: k * k - 4.0 / (h * h),
            alternating: false,
            closure: ghost,
        }),
        SchemeKind::DispersionCorrectedFd => {
            nyquist_guard(k, h, p.nyquist_tol)?;
            let khat = shifted_wavenumber(k, h)?;
            Ok(fitted(1.0 / (h * h), khat * khat, ghost))
        }
    }
}

fn assemble_with(
    p: &HelmholtzProblem,
    grid: &UniformGrid,
    st: &Stencil,
) -> Result<TridiagonalSystem> {
    let n = grid.n();
    let h = grid.h();
    let c = Complex64::new(st.c, 0.0);
    let mut lower = vec![c; n];
    let mut diag = vec![Complex64::new(st.k2, 0.0) - 2.0 * c; n + 1];
    let mut upper = vec![c; n];
    let mut rhs = p.sample_source(grid)?.into_values();

    match st.closure {
        Closure::Bpf { kappa, phase, .. } => {
            let kappa = Complex64::new(kappa, 0.0);
            diag[0] = -kappa * phase;
            upper[0] = kappa;
            rhs[0] = p.g0;
            lower[n - 1] = -kappa;
            diag[n] = kappa * phase;
            rhs[n] = p.gl;
        }
        Closure::Ghost { k2, damping } => {
            // u_{-1} = u_1 - 2h(g0 + ik u_0) substituted into the PDE row at x_0,
            // and u_{n+1} = u_{n-1} + 2h(gL - ik u_n) at x_n
            let boundary_diag = Complex64::new(k2 - 2.0 * st.c, -damping);
            diag[0] = boundary_diag;
            upper[0] = 2.0 * c;
            rhs[0] += 2.0 * p.g0 / h;
            lower[n - 1] = 2.0 * c;
            diag[n] = boundary_diag;
            rhs[n] -= 2.0 * p.gl / h;
        }
    }
    TridiagonalSystem::new(lower, diag, upper, rhs)
}

/// `b - A x` with the second differences formed as differences of first
/// differences. Its rounding error scales like `ε·k/h` rather than the
/// `ε/h²` of the assembled product, which is what makes refinement pay off.
/// When `cos(kh) < 0` the same is done with sums of neighbours.
fn defect(st: &Stencil, rhs: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len() - 1;
    let mut r = vec![Complex64::new(0.0, 0.0); n + 1];
    for i in 1..n {
        r[i] = rhs[i]
            - if st.alternating {
                st.c * ((x[i + 1] + x[i]) + (x[i] + x[i - 1])) + st.k2_minus_4c * x[i]
            } else {
                st.c * ((x[i + 1] - x[i]) - (x[i] - x[i - 1])) + st.k2 * x[i]
            };
    }
    match st.closure {
        Closure::Bpf {
            kappa, em1, ep1, ..
        } => {
            if st.alternating {
                r[0] = rhs[0] - kappa * ((x[1] + x[0]) - ep1 * x[0]);
                r[n] = rhs[n] - kappa * (ep1 * x[n] - (x[n] + x[n - 1]));
            } else {
                r[0] = rhs[0] - kappa * ((x[1] - x[0]) - em1 * x[0]);
                r[n] = rhs[n] - kappa * ((x[n] - x[n - 1]) + em1 * x[n]);
            }
        }
        Closure::Ghost { k2, damping } => {
            let a = Complex64::new(k2, -damping);
            r[0] = rhs[0] - (2.0 * st.c * (x[1] - x[0]) + a * x[0]);
            r[n] = rhs[n] - (2.0 * st.c * (x[n - 1] - x[n]) + a * x[n]);
        }
    }
    r
}

pub fn assemble_bpf(p: &HelmholtzProblem, n: usize) -> Result<TridiagonalSystem> {
    assemble(p, n, SchemeKind::Bpf)
}

/// Interior `Δ_h u + k²u = f`, ghost-point impedance rows.
pub fn assemble_classical_fd(p: &HelmholtzProblem, n: usize) -> Result<TridiagonalSystem> {
    assemble(p, n, SchemeKind::ClassicalFd)
}

/// Interior `Δ_h u + k̂²u = f`; the ghost-point impedance rows keep the
/// physical `k`.
pub fn assemble_dispersion_corrected_fd(
    p: &HelmholtzProblem,
    n: usize,
) -> Result<TridiagonalSystem> {
    assemble(p, n, SchemeKind::DispersionCorrectedFd)
}

pub fn assemble(p: &HelmholtzProblem, n: usize, kind: SchemeKind) -> Result<TridiagonalSystem> {
    let grid = p.grid(n)?;
    assemble_with(p, &grid, &stencil(p, grid.h(), kind)?)
}

/// Correction solves applied after the first Thomas pass.
pub const REFINEMENT_STEPS: usize = 2;

/// Post-solve residual exceeded `1e-10·(‖b‖∞ + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveQualityWarning {
    pub residual: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSolution {
    pub solution: GridFunction,
    pub residual: f64,
    pub warning: Option<SolveQualityWarning>,
}

/// Assembles and solves, then runs [`REFINEMENT_STEPS`] rounds of iterative
/// refinement against the difference-form defect.
pub fn solve_scheme(p: &HelmholtzProblem, n: usize, kind: SchemeKind) -> Result<SchemeSolution> {
    let grid = p.grid(n)?;
    let st = stencil(p, grid.h(), kind)?;
    let mut sys = assemble_with(p, &grid, &st)?;
    let mut x = solve_tridiagonal(&sys)?;
    let rhs = std::mem::take(&mut sys.rhs);
    for _ in 0..REFINEMENT_STEPS {
        sys.rhs = defect(&st, &rhs, &x);
        let dx = solve_tridiagonal(&sys)?;
        x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
    }
    sys.rhs = rhs;
    let residual = residual_inf_norm(&sys, &x)?;
    let b_inf = sys.rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = 1e-10 * (b_inf + 1.0);
    let warning = (!(residual <= threshold)).then_some(SolveQualityWarning {
        residual,
        threshold,
    });
    let solution = GridFunction::new(grid, x)?;
    Ok(SchemeSolution {
        solution,
        residual,
        warning,
    })
}
