//! Error norms against a reference, mesh-refinement studies with fitted
//! rates, `(k, h)` error tables and scheme comparisons at fixed `kh`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{restrict, sample, GridFunction};
use crate::reference::{fine_grid_reference, Benchmark, ExactSolution, FineReferenceCache};
use crate::schemes::{solve_scheme, HelmholtzProblem, SchemeKind};

/// Errors at or below this level are treated as round-off and excluded
/// from rate fits.
pub const RATE_FIT_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Linf,
    L2h,
    /// The discrete seminorm `|·|_{1,h}`.
    H1,
    /// `(k²‖·‖²_{0,h} + |·|²_{1,h})^{1/2}`.
    V,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::Linf, Norm::L2h, Norm::H1, Norm::V];

    pub fn name(self) -> &'static str {
        match self {
            Norm::Linf => "linf",
            Norm::L2h => "l2h",
            Norm::H1 => "h1",
            Norm::V => "v",
        }
    }

    pub fn eval(self, u: &GridFunction, k: f64) -> f64 {
        match self {
            Norm::Linf => u.norm_linf(),
            Norm::L2h => u.norm_l2h(),
            Norm::H1 => u.seminorm_h1h(),
            Norm::V => u.norm_v(k),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Norm::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown norm '{s}'")))
    }
}

/// One value per [`Norm`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormValues {
    pub linf: f64,
    pub l2h: f64,
    pub h1: f64,
    pub v: f64,
}

impl NormValues {
    pub fn of(u: &GridFunction, k: f64) -> Self {
        Self {
            linf: Norm::Linf.eval(u, k),
            l2h: Norm::L2h.eval(u, k),
            h1: Norm::H1.eval(u, k),
            v: Norm::V.eval(u, k),
        }
    }

    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Linf => self.linf,
            Norm::L2h => self.l2h,
            Norm::H1 => self.h1,
            Norm::V => self.v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub absolute: NormValues,
    pub relative: NormValues,
}

/// Norms of `u_h - reference` and their ratios to the norms of `reference`,
/// all on the grid of `u_h`.
pub fn compute_errors(u_h: &GridFunction, reference: &GridFunction, k: f64) -> Result<ErrorReport> {
    let e = u_h.sub(reference)?;
    let absolute = NormValues::of(&e, k);
    let scale = NormValues::of(reference, k);
    let ratio = |a: f64, b: f64| if b == 0.0 { f64::INFINITY } else { a / b };
    Ok(ErrorReport {
        absolute,
        relative: NormValues {
            linf: ratio(absolute.linf, scale.linf),
            l2h: ratio(absolute.l2h, scale.l2h),
            h1: ratio(absolute.h1, scale.h1),
            v: ratio(absolute.v, scale.v),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceKind {
    /// Sample the closed-form solution.
    Exact,
    /// Restrict a BPF solve on `n_ref` subintervals.
    Fine(usize),
}

/// The reference solution on `p.grid(n)`.
pub fn reference_on_grid(
    p: &HelmholtzProblem,
    exact: Option<&ExactSolution>,
    reference: ReferenceKind,
    n: usize,
    cache: &FineReferenceCache,
) -> Result<GridFunction> {
    let grid = p.grid(n)?;
    match reference {
        ReferenceKind::Exact => {
            let exact = exact.ok_or_else(|| {
                Error::InvalidInput(format!("problem '{}' has no exact solution", p.id.name))
            })?;
            sample(|x| (exact.u)(x), &grid)
        }
        ReferenceKind::Fine(n_ref) => {
            let fine = fine_grid_reference(cache, p, n_ref, SchemeKind::Bpf)?;
            restrict(&fine, &grid)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub k: f64,
    pub n: usize,
    pub h: f64,
    pub errors: ErrorReport,
}

/// Least-squares slopes of `log(relative error)` against `log h`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateFits {
    pub linf: Option<f64>,
    pub l2h: Option<f64>,
    pub h1: Option<f64>,
    pub v: Option<f64>,
}

impl RateFits {
    pub fn get(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::Linf => self.linf,
            Norm::L2h => self.l2h,
            Norm::H1 => self.h1,
            Norm::V => self.v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub problem: String,
    pub scheme: SchemeKind,
    pub reference: ReferenceKind,
    /// Ordered by increasing `n`.
    pub rows: Vec<ConvergenceRow>,
    pub rates: RateFits,
}

/// Slope of the least-squares line through `(log h, log e)`. `None` with
/// fewer than two points, or when any error is at or below
/// [`RATE_FIT_FLOOR`] or non-finite.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() != err.len() || h.len() < 2 {
        return None;
    }
    if err.iter().any(|e| !(e.is_finite() && *e > RATE_FIT_FLOOR)) {
        return None;
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput("empty list of grid sizes".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "grid sizes must be strictly increasing: {n_list:?}"
        )));
    }
    Ok(())
}

/// Refinement study of `p` under `kind`. Cells run in parallel; rows come
/// back in the order of `n_list`.
pub fn convergence_study_problem(
    p: &HelmholtzProblem,
    exact: Option<&ExactSolution>,
    kind: SchemeKind,
    n_list: &[usize],
    reference: ReferenceKind,
    cache: &FineReferenceCache,
) -> Result<ConvergenceTable> {
    check_n_list(n_list)?;
    if let ReferenceKind::Fine(n_ref) = reference {
        if let Some(&bad) = n_list.iter().find(|&&n| n_ref % n != 0) {
            return Err(Error::NonNestedGrids {
                fine: n_ref,
                coarse: bad,
            });
        }
        // solve once up front so workers share it
        fine_grid_reference(cache, p, n_ref, SchemeKind::Bpf)?;
    }
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let u_h = solve_scheme(p, n, kind)?.solution;
            let r = reference_on_grid(p, exact, reference, n, cache)?;
            Ok(ConvergenceRow {
                k: p.k,
                n,
                h: u_h.grid().h(),
                errors: compute_errors(&u_h, &r, p.k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let fit = |norm: Norm| {
        let e: Vec<f64> = rows.iter().map(|r| r.errors.relative.get(norm)).collect();
        fit_rate(&h, &e)
    };
    let rates = RateFits {
        linf: fit(Norm::Linf),
        l2h: fit(Norm::L2h),
        h1: fit(Norm::H1),
        v: fit(Norm::V),
    };
    Ok(ConvergenceTable {
        problem: p.id.name.clone(),
        scheme: kind,
        reference,
        rows,
        rates,
    })
}

pub fn convergence_study(
    benchmark: Benchmark,
    kind: SchemeKind,
    k: f64,
    n_list: &[usize],
    reference: ReferenceKind,
    cache: &FineReferenceCache,
) -> Result<ConvergenceTable> {
    let (p, exact) = benchmark.build(k)?;
    convergence_study_problem(&p, exact.as_ref(), kind, n_list, reference, cache)
}

/// Relative errors on a `k × n` grid of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub norm: Norm,
    pub length: f64,
    pub k_list: Vec<f64>,
    pub n_list: Vec<usize>,
    /// `values[i][j]` belongs to `k_list[i]`, `n_list[j]`.
    pub values: Vec<Vec<f64>>,
}

/// Cells of an [`ErrorTable`] sharing one value of `kh`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal {
    pub kh: f64,
    /// `(k, error)` by increasing `k`.
    pub entries: Vec<(f64, f64)>,
}

impl Diagonal {
    /// Number of steps along increasing `k` where the error does not drop.
    pub fn non_monotone_steps(&self) -> usize {
        self.entries
            .windows(2)
            .filter(|w| !(w[1].1 < w[0].1))
            .count()
    }
}

impl ErrorTable {
    pub fn h(&self, j: usize) -> f64 {
        self.length / self.n_list[j] as f64
    }

    /// Groups cells by `kh`, matched to a relative tolerance of `1e-12`;
    /// diagonals are ordered by increasing `kh`.
    pub fn diagonals(&self) -> Vec<Diagonal> {
        let mut out: Vec<Diagonal> = Vec::new();
        for (i, &k) in self.k_list.iter().enumerate() {
            for j in 0..self.n_list.len() {
                let kh = k * self.h(j);
                let entry = (k, self.values[i][j]);
                match out.iter_mut().find(|d| (d.kh - kh).abs() <= 1e-12 * kh) {
                    Some(d) => d.entries.push(entry),
                    None => out.push(Diagonal {
                        kh,
                        entries: vec![entry],
                    }),
                }
            }
        }
        for d in &mut out {
            d.entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        out.sort_by(|a, b| a.kh.total_cmp(&b.kh));
        out
    }
}

pub fn error_table(
    benchmark: Benchmark,
    kind: SchemeKind,
    k_list: &[f64],
    n_list: &[usize],
    reference: ReferenceKind,
    norm: Norm,
    cache: &FineReferenceCache,
) -> Result<ErrorTable> {
    let problems = build_all(benchmark, k_list)?;
    error_table_for(&problems, kind, n_list, reference, norm, cache)
}

/// [`error_table`] over already built problems, one row per problem.
pub fn error_table_for(
    problems: &[(HelmholtzProblem, Option<ExactSolution>)],
    kind: SchemeKind,
    n_list: &[usize],
    reference: ReferenceKind,
    norm: Norm,
    cache: &FineReferenceCache,
) -> Result<ErrorTable> {
    if problems.is_empty() {
        return Err(Error::InvalidInput("empty list of wavenumbers".into()));
    }
    check_n_list(n_list)?;
    if let ReferenceKind::Fine(n_ref) = reference {
        problems
            .par_iter()
            .map(|(p, _)| fine_grid_reference(cache, p, n_ref, SchemeKind::Bpf).map(|_| ()))
            .collect::<Result<()>>()?;
    }
    let cells: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|i| (0..n_list.len()).map(move |j| (i, j)))
        .collect();
    let flat = cells
        .par_iter()
        .map(|&(i, j)| {
            let (p, exact) = &problems[i];
            let n = n_list[j];
            let u_h = solve_scheme(p, n, kind)?.solution;
            let r = reference_on_grid(p, exact.as_ref(), reference, n, cache)?;
            Ok(compute_errors(&u_h, &r, p.k)?.relative.get(norm))
        })
        .collect::<Result<Vec<f64>>>()?;
    let values = flat.chunks(n_list.len()).map(|c| c.to_vec()).collect();
    Ok(ErrorTable {
        norm,
        length: problems[0].0.length,
        k_list: problems.iter().map(|(p, _)| p.k).collect(),
        n_list: n_list.to_vec(),
        values,
    })
}

fn build_all(
    benchmark: Benchmark,
    k_list: &[f64],
) -> Result<Vec<(HelmholtzProblem, Option<ExactSolution>)>> {
    k_list.iter().map(|&k| benchmark.build(k)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scheme: SchemeKind,
    pub kh: f64,
    pub k: f64,
    pub n: usize,
    pub error: f64,
}

/// Relative errors of each scheme over `k_list` at each fixed `kh`, with
/// `n = kL/kh` (which must be an integer).
pub fn scheme_comparison(
    benchmark: Benchmark,
    kinds: &[SchemeKind],
    k_list: &[f64],
    kh_list: &[f64],
    reference: ReferenceKind,
    norm: Norm,
    cache: &FineReferenceCache,
) -> Result<Vec<ComparisonRow>> {
    let problems = build_all(benchmark, k_list)?;
    scheme_comparison_for(&problems, kinds, kh_list, reference, norm, cache)
}

/// [`scheme_comparison`] over already built problems. Rows are ordered by
/// scheme, then `kh`, then problem.
pub fn scheme_comparison_for(
    problems: &[(HelmholtzProblem, Option<ExactSolution>)],
    kinds: &[SchemeKind],
    kh_list: &[f64],
    reference: ReferenceKind,
    norm: Norm,
    cache: &FineReferenceCache,
) -> Result<Vec<ComparisonRow>> {
    let mut cells = Vec::new();
    for &kind in kinds {
        for &kh in kh_list {
            for (i, (p, _)) in problems.iter().enumerate() {
                let nf = p.k * p.length / kh;
                let n = nf.round();
                if !(n >= 1.0) || (nf - n).abs() > 1e-9 * nf {
                    return Err(Error::InvalidInput(format!(
                        "kL/kh = {nf} is not a whole number of cells (k = {}, kh = {kh})",
                        p.k
                    )));
                }
                cells.push((kind, kh, i, n as usize));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(kind, kh, i, n)| {
            let (p, exact) = &problems[i];
            let u_h = solve_scheme(p, n, kind)?.solution;
            let r = reference_on_grid(p, exact.as_ref(), reference, n, cache)?;
            Ok(ComparisonRow {
                scheme: kind,
                kh,
                k: p.k,
                n,
                error: compute_errors(&u_h, &r, p.k)?.relative.get(norm),
            })
        })
        .collect()
}
