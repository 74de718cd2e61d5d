//! Benchmark problems with exact, semi-analytic or fine-grid references.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::schemes::{
    solve_scheme, HelmholtzProblem, ProblemId, ScalarFn, SchemeKind, SourceDerivatives,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Closed-form solution with its first two derivatives.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub du: ScalarFn,
    pub d2u: ScalarFn,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

impl ExactSolution {
    /// `u'' + k²u - f` at `x`.
    pub fn pde_residual(&self, p: &HelmholtzProblem, x: f64) -> Complex64 {
        (self.d2u)(x) + p.k * p.k * (self.u)(x) - (p.source)(x)
    }

    /// Left and right impedance residuals against the problem data.
    pub fn impedance_residuals(&self, p: &HelmholtzProblem) -> (Complex64, Complex64) {
        let k = p.k;
        let l = p.length;
        let left = (self.du)(0.0) - I * k * (self.u)(0.0) - p.g0;
        let right = (self.du)(l) + I * k * (self.u)(l) - p.gl;
        (left, right)
    }
}

/// Coefficients of `α e^{ikx} + β e^{-ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl PlaneWaveCoefficients {
    /// Solves `-2ikβ = g0`, `2ik e^{ikL} α = gL`.
    pub fn from_impedance(g0: Complex64, gl: Complex64, k: f64, length: f64) -> Self {
        let beta = -g0 / (2.0 * I * k);
        let alpha = gl / (2.0 * I * k * Complex64::from_polar(1.0, k * length));
        Self { alpha, beta }
    }

    pub fn impedance_data(&self, k: f64, length: f64) -> (Complex64, Complex64) {
        let g0 = -2.0 * I * k * self.beta;
        let gl = 2.0 * I * k * Complex64::from_polar(1.0, k * length) * self.alpha;
        (g0, gl)
    }

    pub fn exact(&self, k: f64) -> ExactSolution {
        let (a, b) = (self.alpha, self.beta);
        let wave = move |x: f64| {
            (
                Complex64::from_polar(1.0, k * x),
                Complex64::from_polar(1.0, -k * x),
            )
        };
        ExactSolution {
            u: Arc::new(move |x| {
                let (p, m) = wave(x);
                a * p + b * m
            }),
            du: Arc::new(move |x| {
                let (p, m) = wave(x);
                I * k * (a * p - b * m)
            }),
            d2u: Arc::new(move |x| {
                let (p, m) = wave(x);
                -k * k * (a * p + b * m)
            }),
        }
    }
}

pub fn plane_wave_problem(
    k: f64,
    alpha: Complex64,
    beta: Complex64,
    length: f64,
) -> Result<(HelmholtzProblem, ExactSolution)> {
    let coeffs = PlaneWaveCoefficients { alpha, beta };
    let (g0, gl) = coeffs.impedance_data(k, length);
    let p = HelmholtzProblem::new(
        "planewave",
        k,
        length,
        Arc::new(|_| Complex64::new(0.0, 0.0)),
        g0,
        gl,
    )?
    .with_source_derivatives(SourceDerivatives {
        second: Arc::new(|_| Complex64::new(0.0, 0.0)),
        third: Arc::new(|_| Complex64::new(0.0, 0.0)),
    });
    Ok((p, coeffs.exact(k)))
}

/// Dense real polynomial, ascending coefficients.
#[derive(Debug, Clone)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| j as f64 * c)
                .collect(),
        )
    }

    fn nth_derivative(&self, order: usize) -> Poly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }
}

fn real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(move |x| Complex64::new(f(x), 0.0))
}

/// `u = e^{ikx} + x⁴(1-x)⁴` on `(0, 1)`, `f = r'' + k²r`.
pub fn smooth_manufactured_problem(k: f64) -> Result<(HelmholtzProblem, ExactSolution)> {
    // x⁴(1 - x)⁴ = x⁴ - 4x⁵ + 6x⁶ - 4x⁷ + x⁸
    let r = Poly(vec![0.0, 0.0, 0.0, 0.0, 1.0, -4.0, 6.0, -4.0, 1.0]);
    let derivs: Vec<Poly> = (0..=5).map(|m| r.nth_derivative(m)).collect();
    let k2 = k * k;
    let d = Arc::new(derivs);

    let source = {
        let d = d.clone();
        real_fn(move |x| d[2].eval(x) + k2 * d[0].eval(x))
    };
    let second = {
        let d = d.clone();
        real_fn(move |x| d[4].eval(x) + k2 * d[2].eval(x))
    };
    let third = {
        let d = d.clone();
        real_fn(move |x| d[5].eval(x) + k2 * d[3].eval(x))
    };

    let g0 = Complex64::new(0.0, 0.0);
    let gl = 2.0 * I * k * Complex64::from_polar(1.0, k);
    let p = HelmholtzProblem::new("smooth", k, 1.0, source, g0, gl)?
        .with_source_derivatives(SourceDerivatives { second, third });

    let exact = {
        let (d0, d1, d2) = (d.clone(), d.clone(), d);
        ExactSolution {
            u: Arc::new(move |x| Complex64::from_polar(1.0, k * x) + d0[0].eval(x)),
            du: Arc::new(move |x| I * k * Complex64::from_polar(1.0, k * x) + d1[1].eval(x)),
            d2u: Arc::new(move |x| -k2 * Complex64::from_polar(1.0, k * x) + d2[2].eval(x)),
        }
    };
    Ok((p, exact))
}

/// Impedance data shared by the nonsmooth and `sin²` benchmarks.
pub const BENCHMARK_G0: Complex64 = Complex64::new(2.0, 0.0);
pub const BENCHMARK_GL: Complex64 = Complex64::new(0.0, 1.0);

/// `f = sin²(πx)` on `(0, 1)` with `g0 = 2`, `gL = i`; exact solution by
/// undetermined coefficients.
pub fn sine_squared_problem(k: f64) -> Result<(HelmholtzProblem, ExactSolution)> {
    let four_pi2 = 4.0 * PI * PI;
    if !(k >= 1e-8) || (k * k - four_pi2).abs() < 1e-8 * k * k {
        return Err(Error::ResonantSource { k });
    }
    let k2 = k * k;
    let two_pi = 2.0 * PI;
    let c0 = 1.0 / (2.0 * k2);
    let c1 = -1.0 / (2.0 * (k2 - four_pi2));
    // u_p = c0 + c1 cos(2πx)
    let up = move |x: f64| c0 + c1 * (two_pi * x).cos();
    let dup = move |x: f64| -two_pi * c1 * (two_pi * x).sin();
    let d2up = move |x: f64| -four_pi2 * c1 * (two_pi * x).cos();

    let (g0, gl) = (BENCHMARK_G0, BENCHMARK_GL);
    let length = 1.0;
    // impedance data left over for the homogeneous part
    let g0_h = g0 - (dup(0.0) - I * k * up(0.0));
    let gl_h = gl - (dup(length) + I * k * up(length));
    let pw = PlaneWaveCoefficients::from_impedance(g0_h, gl_h, k, length);
    let hom = pw.exact(k);

    let source = real_fn(move |x| {
        let s = (PI * x).sin();
        s * s
    });
    let second = real_fn(move |x| 2.0 * PI * PI * (two_pi * x).cos());
    let third = real_fn(move |x| -4.0 * PI * PI * PI * (two_pi * x).sin());

    let p = HelmholtzProblem::new("sine2", k, length, source, g0, gl)?
        .with_source_derivatives(SourceDerivatives { second, third });

    let exact = {
        let (h0, h1, h2) = (hom.u.clone(), hom.du.clone(), hom.d2u.clone());
        ExactSolution {
            u: Arc::new(move |x| h0(x) + up(x)),
            du: Arc::new(move |x| h1(x) + dup(x)),
            d2u: Arc::new(move |x| h2(x) + d2up(x)),
        }
    };
    Ok((p, exact))
}

/// `f = 50` on `|x - 1/2| ≤ 1/9`, zero elsewhere; `g0 = 2`, `gL = i`.
pub fn box_source_problem(k: f64) -> Result<HelmholtzProblem> {
    let source = real_fn(|x| {
        if (x - 0.5).abs() <= 1.0 / 9.0 {
            50.0
        } else {
            0.0
        }
    });
    HelmholtzProblem::new("box", k, 1.0, source, BENCHMARK_G0, BENCHMARK_GL)
}

/// The four named benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    /// `2e^{ikx} + e^{-ikx}`, zero source.
    PlaneWave,
    Smooth,
    Box,
    SineSquared,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [
        Benchmark::PlaneWave,
        Benchmark::Smooth,
        Benchmark::Box,
        Benchmark::SineSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::PlaneWave => "planewave",
            Benchmark::Smooth => "smooth",
            Benchmark::Box => "box",
            Benchmark::SineSquared => "sine2",
        }
    }

    /// Builds the problem at wavenumber `k`, with its exact solution when
    /// one is known.
    pub fn build(self, k: f64) -> Result<(HelmholtzProblem, Option<ExactSolution>)> {
        match self {
            Benchmark::PlaneWave => {
                let (p, e) = plane_wave_problem(k, 2.0.into(), 1.0.into(), 1.0)?;
                Ok((p, Some(e)))
            }
            Benchmark::Smooth => smooth_manufactured_problem(k).map(|(p, e)| (p, Some(e))),
            Benchmark::Box => box_source_problem(k).map(|p| (p, None)),
            Benchmark::SineSquared => sine_squared_problem(k).map(|(p, e)| (p, Some(e))),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown benchmark '{s}'")))
    }
}

type CacheKey = (ProblemId, usize, SchemeKind);

/// Fine-grid solutions keyed by `(problem id, n_ref, scheme)`.
#[derive(Default)]
pub struct FineReferenceCache {
    entries: Mutex<HashMap<CacheKey, Arc<GridFunction>>>,
}

impl FineReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached solution, solving on a miss. Concurrent misses on
    /// the same key may both solve; the first insert wins.
    pub fn get_or_solve(
        &self,
        p: &HelmholtzProblem,
        n_ref: usize,
        kind: SchemeKind,
    ) -> Result<Arc<GridFunction>> {
        let key = (p.id.clone(), n_ref, kind);
        if let Some(hit) = self.entries.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let solved = Arc::new(solve_scheme(p, n_ref, kind)?.solution);
        let mut entries = self.entries.lock().expect("cache poisoned");
        Ok(entries.entry(key).or_insert(solved).clone())
    }
}

/// Solves `p` on `n_ref` subintervals, going through `cache`.
pub fn fine_grid_reference(
    cache: &FineReferenceCache,
    p: &HelmholtzProblem,
    n_ref: usize,
    kind: SchemeKind,
) -> Result<Arc<GridFunction>> {
    cache.get_or_solve(p, n_ref, kind)
}
