use bpf_helmholtz::analysis::{
    convergence_study_problem, error_table_for, fit_rate, run_suite, scheme_comparison_for,
    ConvergenceTable, ErrorTable, Norm, ReferenceKind, Suite,
};
use bpf_helmholtz::{
    sample, solve_scheme, Benchmark, ExactSolution, FineReferenceCache, HelmholtzProblem,
    SchemeKind,
};

use crate::args::{Command, Options, DEFAULT_SEED};
use crate::output::{real, Csv};
use crate::CliError;

/// CSV text plus the verdict of any check the command makes.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub passed: bool,
    /// One line for stderr when a check fails.
    pub summary: Option<String>,
}

impl Report {
    fn ok(csv: String) -> Self {
        Self {
            csv,
            passed: true,
            summary: None,
        }
    }
}

pub fn run(command: &Command, opts: &Options) -> Result<Report, CliError> {
    match command {
        Command::Exactness => exactness(opts),
        Command::Convergence => convergence(opts),
        Command::Table => table(opts),
        Command::Compare => compare(opts),
        Command::Verify { suite } => verify(*suite, opts),
    }
}

const TABLE_EXPONENTS: std::ops::RangeInclusive<i32> = 5..=10;

fn pow_list(base: usize, lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| base.pow(e)).collect()
}

fn build(
    benchmark: Benchmark,
    k: f64,
    opts: &Options,
) -> Result<(HelmholtzProblem, Option<ExactSolution>), CliError> {
    let (p, exact) = benchmark.build(k)?;
    let p = match opts.nyquist_tol {
        Some(tol) => p.with_nyquist_tol(tol),
        None => p,
    };
    Ok((p, exact))
}

/// `--n-list`, else `--h-list` converted through `L`, else `default`.
fn grid_sizes(opts: &Options, length: f64, default: Vec<usize>) -> Result<Vec<usize>, CliError> {
    if opts.n_list.is_some() && opts.h_list.is_some() {
        return Err(CliError::Usage(
            "give either --n-list or --h-list, not both".into(),
        ));
    }
    let sizes = match (&opts.n_list, &opts.h_list) {
        (Some(n), _) => n.clone(),
        (None, Some(h)) => h
            .iter()
            .map(|&h| {
                let nf = length / h;
                let n = nf.round();
                if h > 0.0 && n >= 1.0 && (nf - n).abs() <= 1e-9 * nf {
                    Ok(n as usize)
                } else {
                    Err(CliError::Usage(format!(
                        "h = {h} does not divide L = {length} into whole cells"
                    )))
                }
            })
            .collect::<Result<_, _>>()?,
        (None, None) => default,
    };
    if sizes.is_empty() {
        return Err(CliError::Usage("empty list of grid sizes".into()));
    }
    Ok(sizes)
}

fn single_scheme(opts: &Options) -> Result<SchemeKind, CliError> {
    match opts.scheme.as_deref() {
        None => Ok(SchemeKind::Bpf),
        Some([kind]) => Ok(*kind),
        Some(_) => Err(CliError::Usage(
            "this subcommand takes a single --scheme".into(),
        )),
    }
}

fn k_list(opts: &Options, default: Vec<f64>) -> Result<Vec<f64>, CliError> {
    let list = opts.k_list.clone().unwrap_or(default);
    if list.is_empty() {
        return Err(CliError::Usage("empty list of wavenumbers".into()));
    }
    Ok(list)
}

fn exactness(opts: &Options) -> Result<Report, CliError> {
    let k = opts.k.unwrap_or(128.0);
    let n = opts.n.unwrap_or(8);
    let tol = opts.tol.unwrap_or(1e-12);
    let (p, exact) = build(Benchmark::PlaneWave, k, opts)?;
    let exact = exact.expect("plane wave has a closed form");
    let u_h = solve_scheme(&p, n, SchemeKind::Bpf)?.solution;
    let u = sample(|x| (exact.u)(x), u_h.grid())?;
    let err = u_h.sub(&u)?.norm_linf();

    let mut csv = Csv::new();
    csv.row(["k", "n", "h", "err_linf_abs"]);
    csv.row([real(k), n.to_string(), real(u_h.grid().h()), real(err)]);
    let passed = err <= tol;
    Ok(Report {
        csv: csv.finish(),
        passed,
        summary: (!passed).then(|| format!("plane-wave error {err:e} exceeds {tol:e}")),
    })
}

fn default_reference(
    opts: &Options,
    exact: Option<&ExactSolution>,
    fallback: usize,
) -> ReferenceKind {
    match (opts.n_ref, exact) {
        (Some(n_ref), _) => ReferenceKind::Fine(n_ref),
        (None, Some(_)) => ReferenceKind::Exact,
        (None, None) => ReferenceKind::Fine(fallback),
    }
}

fn convergence(opts: &Options) -> Result<Report, CliError> {
    let benchmark = opts.benchmark.unwrap_or(Benchmark::Smooth);
    let k = opts.k.unwrap_or(32.0);
    let (p, exact) = build(benchmark, k, opts)?;
    let top = if benchmark == Benchmark::Box { 10 } else { 9 };
    let n_list = grid_sizes(opts, p.length, pow_list(3, 5, top))?;
    let reference = default_reference(opts, exact.as_ref(), 3usize.pow(12));
    let cache = FineReferenceCache::new();
    let t = convergence_study_problem(
        &p,
        exact.as_ref(),
        single_scheme(opts)?,
        &n_list,
        reference,
        &cache,
    )?;
    Ok(Report::ok(convergence_csv(&t)))
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn convergence_csv(t: &ConvergenceTable) -> String {
    let mut csv = Csv::new();
    csv.row(["k", "h", "err_linf_rel", "err_v_rel"]);
    for r in &t.rows {
        csv.row([
            real(r.k),
            real(r.h),
            real(r.errors.relative.linf),
            real(r.errors.relative.v),
        ]);
    }
    csv.row([
        "rate_fit".to_string(),
        String::new(),
        optional(t.rates.linf),
        optional(t.rates.v),
    ]);
    csv.finish()
}

fn table(opts: &Options) -> Result<Report, CliError> {
    let benchmark = opts.benchmark.unwrap_or(Benchmark::SineSquared);
    let ks = k_list(opts, TABLE_EXPONENTS.map(|e| 2f64.powi(e)).collect())?;
    let problems = ks
        .iter()
        .map(|&k| build(benchmark, k, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let n_list = grid_sizes(opts, problems[0].0.length, pow_list(2, 5, 10))?;
    let reference = ReferenceKind::Fine(opts.n_ref.unwrap_or(1 << 18));
    let norm = opts.norm.unwrap_or(Norm::V);
    let cache = FineReferenceCache::new();
    let t = error_table_for(
        &problems,
        single_scheme(opts)?,
        &n_list,
        reference,
        norm,
        &cache,
    )?;
    Ok(Report::ok(table_csv(&t)))
}

fn table_csv(t: &ErrorTable) -> String {
    let mut csv = Csv::new();
    let mut header = vec!["k".to_string()];
    header.extend((0..t.n_list.len()).map(|j| format!("h={}", real(t.h(j)))));
    csv.row(header);
    for (k, row) in t.k_list.iter().zip(&t.values) {
        let mut cells = vec![real(*k)];
        cells.extend(row.iter().map(|&v| real(v)));
        csv.row(cells);
    }
    // one line per fixed kh: slope of log(error) against log(k)
    csv.row(["diagonal_kh", "entries", "non_monotone_steps", "decay_rate"]);
    for d in t.diagonals() {
        let ks: Vec<f64> = d.entries.iter().map(|e| e.0).collect();
        let es: Vec<f64> = d.entries.iter().map(|e| e.1).collect();
        csv.row([
            real(d.kh),
            d.entries.len().to_string(),
            d.non_monotone_steps().to_string(),
            optional(fit_rate(&ks, &es).map(|s| -s)),
        ]);
    }
    csv.finish()
}

fn compare(opts: &Options) -> Result<Report, CliError> {
    let benchmark = opts.benchmark.unwrap_or(Benchmark::SineSquared);
    let ks = k_list(opts, (5..=9).map(|e| 2f64.powi(e)).collect())?;
    let kh_list = opts.kh_list.clone().unwrap_or_else(|| vec![0.5, 1.0]);
    if kh_list.is_empty() {
        return Err(CliError::Usage("empty list of kh values".into()));
    }
    let kinds = opts
        .scheme
        .clone()
        .unwrap_or_else(|| SchemeKind::ALL.to_vec());
    let norm = opts.norm.unwrap_or(Norm::Linf);
    let problems = ks
        .iter()
        .map(|&k| build(benchmark, k, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let reference = ReferenceKind::Fine(opts.n_ref.unwrap_or(1 << 18));
    let cache = FineReferenceCache::new();
    let rows = scheme_comparison_for(&problems, &kinds, &kh_list, reference, norm, &cache)?;

    let mut csv = Csv::new();
    csv.row([
        "scheme".to_string(),
        "kh".to_string(),
        "k".to_string(),
        "n".to_string(),
        format!("err_{}_rel", norm.name()),
    ]);
    for r in &rows {
        csv.row([
            r.scheme.name().to_string(),
            real(r.kh),
            real(r.k),
            r.n.to_string(),
            real(r.error),
        ]);
    }
    Ok(Report::ok(csv.finish()))
}

fn verify(suite: Suite, opts: &Options) -> Result<Report, CliError> {
    let r = run_suite(suite, opts.seed.unwrap_or(DEFAULT_SEED))?;
    let mut csv = Csv::new();
    csv.row(["suite", "check", "passed", "measured", "threshold", "cases"]);
    for c in &r.checks {
        csv.row([
            suite.name().to_string(),
            c.name.clone(),
            c.passed.to_string(),
            real(c.measured),
            real(c.threshold),
            c.cases.to_string(),
        ]);
    }
    let failing: Vec<&str> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    Ok(Report {
        csv: csv.finish(),
        passed: r.passed(),
        summary: (!failing.is_empty())
            .then(|| format!("{suite}: failing checks {}", failing.join(", "))),
    })
}
