//! Command-line front end. Every run prints its resolved configuration and
//! the library version ahead of the result; rationals are always strings
//! and floats appear only under `approx_` keys.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::catalog::{build, ProcessName};
use crate::connectivity::{connectivity_kernel, connectivity_set, containing_probability, q_closed_form};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::RationalMatrix;
use crate::groupcarries::{
    builtin_setup, carries_a_sequence, carries_spec, factor_set, is_trivial_factor_set, multiply_column,
    reconstruct_product, CentralExtensionSetup, GroupFile,
};
use crate::onedep::kernel::kernel_csv;
use crate::onedep::{
    correlation, distribution, kernel_stationary, pattern_probability, validate_spec, OneDepSpec, Pattern, SpecFile,
};
use crate::oracle::{oracle_correlations, oracle_distribution, OracleModel, DEFAULT_BUDGET};
use crate::stats::{
    binomial_gate, count_moments, count_polynomial, gate, normal_approx_check, numeric_eigenvalues,
    simulate_group_carries, simulate_process, site_kernel, uniform_sum_check, Gate, SimulationReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "onedep", version, about = "Exact computations for one-dependent determinantal processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; `oracle` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ModelArgs {
    /// Catalog name (e.g. `carries:b=10`, `descents:mallows:q=1/2`),
    /// `group:<name>` or `connectivity`.
    #[arg(long)]
    model: Option<String>,
    /// Spec file written by `onedep spec`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Group file (Cayley table, subgroup, representatives).
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// Horizon: sites are `1..n-1` (for carries, `n` is the number of summands).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Probability of one pattern, or the whole distribution.
    Prob {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        /// Sites carrying a one; all other sites are zero.
        #[arg(long, value_delimiter = ',', conflicts_with = "pattern")]
        ones: Option<Vec<usize>>,
        /// Bitstring `t_1 .. t_{n-1}`.
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Correlation `rho(A) = P(ones at every site of A)`; all subsets when
    /// `--sites` is absent.
    Corr {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        sites: Option<Vec<usize>>,
    },
    /// Stationary kernel values `k(m)` over `--range a..b`, or the dense
    /// kernel on the sites.
    Kernel {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
    },
    /// Law of the number of ones from `det(I + (x-1)K)`, with trace moments.
    Counts {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
    },
    /// Normal approximation report and numeric eigenvalues.
    Stats {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
    },
    /// Seeded Monte Carlo with 4-standard-error gates.
    Simulate {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        /// Sample `floor(U_1 + .. + U_n)` instead of a model.
        #[arg(long)]
        uniform_sum: bool,
    },
    /// Compare every pattern probability and kernel minor with exhaustive
    /// enumeration; exits 1 on any mismatch.
    OracleCheck {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Exhaustive pattern distribution.
    Oracle {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Cosets, factor set and carries of a central extension.
    Group {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        /// Column of representative names to multiply.
        #[arg(long, value_delimiter = ',')]
        column: Option<Vec<String>>,
        /// Print the group file instead.
        #[arg(long)]
        export: bool,
    },
    /// Kernel and containment probabilities of the connectivity set.
    Connectivity {
        #[arg(long)]
        n: usize,
        /// A permutation of `1..n` in one-line notation.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
    },
    /// Check every pattern determinant is nonnegative up to `--max-n`.
    Validate {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Write the model as a spec file.
    Spec {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prob { .. } => "prob",
            Command::Corr { .. } => "corr",
            Command::Kernel { .. } => "kernel",
            Command::Counts { .. } => "counts",
            Command::Stats { .. } => "stats",
            Command::Simulate { .. } => "simulate",
            Command::OracleCheck { .. } => "oracle-check",
            Command::Oracle { .. } => "oracle",
            Command::Group { .. } => "group",
            Command::Connectivity { .. } => "connectivity",
            Command::Validate { .. } => "validate",
            Command::Spec { .. } => "spec",
        }
    }
}

/// A result as JSON fields plus an optional table for CSV output.
struct Outcome {
    fields: Map<String, Value>,
    table: Option<Table>,
    exit: i32,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn new() -> Self {
        Self { fields: Map::new(), table: None, exit: 0 }
    }

    fn set(mut self, key: &str, v: Value) -> Self {
        self.fields.insert(key.to_string(), v);
        self
    }

    fn table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header: header.iter().map(|s| s.to_string()).collect(), rows });
        self
    }
}

fn r(v: &Rational) -> Value {
    Value::String(rational::format(v))
}

fn rs(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(r).collect())
}

fn matrix_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| rs(m.row(i))).collect())
}

fn set_string(set: &[usize]) -> String {
    set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

enum Source {
    Spec(OneDepSpec),
    Process(ProcessName),
    Group(CentralExtensionSetup, String),
    Connectivity,
}

/// Reads a JSON file, unwrapping `key` when the file is a full `onedep`
/// output document.
fn read_json(path: &PathBuf, key: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(value.get(key).cloned().unwrap_or(value))
}

fn source(args: &ModelArgs) -> Result<Source> {
    let given = [args.model.is_some(), args.spec.is_some(), args.group_file.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::Parse("give exactly one of --model, --spec, --group-file".into()));
    }
    if let Some(path) = &args.spec {
        let file: SpecFile =
            serde_json::from_value(read_json(path, "spec")?).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(Source::Spec(file.into_spec()?));
    }
    if let Some(path) = &args.group_file {
        let file: GroupFile =
            serde_json::from_value(read_json(path, "group")?).map_err(|e| Error::Parse(e.to_string()))?;
        let setup = file.into_setup()?;
        return Ok(Source::Group(setup, path.display().to_string()));
    }
    let model = args.model.as_deref().expect("checked above");
    if model == "connectivity" {
        return Ok(Source::Connectivity);
    }
    if let Some(name) = model.strip_prefix("group:") {
        return Ok(Source::Group(builtin_setup(name)?, model.to_string()));
    }
    Ok(Source::Process(model.parse()?))
}

fn horizon(args: &ModelArgs, src: &Source) -> Result<usize> {
    match (args.n, src) {
        (Some(n), _) => Ok(n),
        (None, Source::Spec(s)) => Ok(s.horizon()),
        (None, Source::Process(p)) => p
            .natural_horizon()
            .ok_or_else(|| Error::Parse("--n is required for this model".into())),
        (None, _) => Err(Error::Parse("--n is required".into())),
    }
}

fn one_dep(args: &ModelArgs) -> Result<(OneDepSpec, String)> {
    let src = source(args)?;
    let n = horizon(args, &src)?;
    match src {
        Source::Spec(s) => {
            let s = if s.horizon() == n { s } else { s.with_horizon(n)? };
            Ok((s, "spec-file".into()))
        }
        Source::Process(p) => Ok((build(&p, n)?, p.to_string())),
        Source::Group(setup, label) => Ok((carries_spec(&setup, n)?, label)),
        Source::Connectivity => Err(Error::Unsupported(
            "the connectivity set is not one-dependent; use the connectivity subcommand".into(),
        )),
    }
}

fn oracle_model(args: &ModelArgs) -> Result<(OracleModel, usize)> {
    let src = source(args)?;
    let n = horizon(args, &src)?;
    let m = match src {
        Source::Process(p) => OracleModel::Process(p),
        Source::Group(setup, _) => OracleModel::Group(setup),
        Source::Connectivity => OracleModel::Connectivity,
        Source::Spec(_) => {
            return Err(Error::Unsupported("the oracle needs a named model, not a spec file".into()));
        }
    };
    Ok((m, n))
}

fn gates_json(gates: &[Gate]) -> Value {
    Value::Array(
        gates
            .iter()
            .map(|g| {
                json!({
                    "name": g.name,
                    "approx_estimate": g.approx_estimate,
                    "approx_target": g.approx_target,
                    "approx_se": g.approx_se,
                    "approx_z": g.approx_z,
                    "pass": g.pass,
                })
            })
            .collect(),
    )
}

fn gate_rows(gates: &[Gate]) -> Vec<Vec<String>> {
    gates
        .iter()
        .map(|g| {
            vec![
                g.name.clone(),
                format!("{:.10}", g.approx_estimate),
                format!("{:.10}", g.approx_target),
                format!("{:.3e}", g.approx_se),
                format!("{:.3}", g.approx_z),
                g.pass.to_string(),
            ]
        })
        .collect()
}

/// Gates of an empirical run against the exact spec: site rates, adjacent
/// covariances and the count law.
fn simulation_gates(report: &SimulationReport, spec: &OneDepSpec) -> Result<(Vec<Gate>, Map<String, Value>)> {
    let sites = report.n - 1;
    let mut gates = Vec::new();
    let mut exact = Map::new();
    let rho1: Vec<Rational> = (1..=sites).map(|i| correlation(spec, &[i])).collect::<Result<_>>()?;
    for (i, p) in rho1.iter().enumerate() {
        gates.push(binomial_gate(format!("P(X_{} = 1)", i + 1), report.site_ones[i], report.reps, rational::to_f64(p)));
    }
    let mut covs = Vec::new();
    for i in 1..sites {
        let cov = correlation(spec, &[i, i + 1])? - &rho1[i - 1] * &rho1[i];
        gates.push(gate(format!("Cov(X_{i}, X_{})", i + 1), report.adjacent_covariance(i)?, rational::to_f64(&cov)));
        covs.push(cov);
    }
    if sites <= 40 {
        let poly = count_polynomial(&site_kernel(spec)?)?;
        for (j, p) in poly.coefficients().iter().enumerate() {
            gates.push(binomial_gate(format!("P(N = {j})"), report.count_histogram[j], report.reps, rational::to_f64(p)));
        }
        exact.insert("count_law".into(), rs(poly.coefficients()));
    }
    exact.insert("site_rates".into(), rs(&rho1));
    exact.insert("adjacent_covariances".into(), rs(&covs));
    Ok((gates, exact))
}

fn empirical_json(report: &SimulationReport) -> Value {
    let pooled = report.pooled_rate().ok();
    json!({
        "reps": report.reps,
        "seed": report.seed,
        "site_ones": report.site_ones,
        "adjacent_both": report.adjacent_both,
        "count_histogram": report.count_histogram,
        "approx_pooled_rate": pooled.map(|e| e.value),
        "approx_pooled_rate_se": pooled.map(|e| e.se),
    })
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Prob { model, ones, pattern } => {
            let (spec, label) = one_dep(model)?;
            let n = spec.horizon();
            let chosen = match (ones, pattern) {
                (Some(o), None) => Some(Pattern::from_ones(n, o)?),
                (None, Some(p)) => {
                    let p = Pattern::parse(p)?;
                    if p.horizon() != n {
                        return Err(Error::Dimension(format!("pattern has {} sites, horizon {n} has {}", p.len(), n - 1)));
                    }
                    Some(p)
                }
                _ => None,
            };
            let out = Outcome::new().set("model", json!(label)).set("n", json!(n));
            match chosen {
                Some(p) => {
                    let v = pattern_probability(&spec, &p)?;
                    Ok(out
                        .set("pattern", json!(p.to_string()))
                        .set("probability", r(&v))
                        .table(&["pattern", "probability"], vec![vec![p.to_string(), rational::format(&v)]]))
                }
                None => {
                    let d = distribution(&spec)?;
                    let rows: Vec<Vec<String>> = d.iter().map(|(p, v)| vec![p.to_string(), rational::format(v)]).collect();
                    let obj: Map<String, Value> = d.iter().map(|(p, v)| (p.to_string(), r(v))).collect();
                    Ok(out.set("distribution", Value::Object(obj)).table(&["pattern", "probability"], rows))
                }
            }
        }
        Command::Corr { model, sites } => {
            let (spec, label) = one_dep(model)?;
            let n = spec.horizon();
            let sets: Vec<Vec<usize>> = match sites {
                Some(s) => vec![s.clone()],
                None => {
                    if n > 16 {
                        return Err(Error::Parse("give --sites for horizons above 16".into()));
                    }
                    (0u64..1 << (n - 1))
                        .map(|mask| (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
                        .collect()
                }
            };
            let mut rows = Vec::new();
            let mut arr = Vec::new();
            for s in &sets {
                let v = correlation(&spec, s)?;
                arr.push(json!({"sites": s, "rho": r(&v)}));
                rows.push(vec![set_string(s), rational::format(&v)]);
            }
            Ok(Outcome::new()
                .set("model", json!(label))
                .set("n", json!(n))
                .set("correlations", Value::Array(arr))
                .table(&["sites", "rho"], rows))
        }
        Command::Kernel { model, range } => {
            if let Some(range) = range {
                let (lo, hi) = range
                    .split_once("..")
                    .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                    .ok_or_else(|| Error::Parse(format!("range `{range}` is not `a..b`")))?;
                if lo > hi {
                    return Err(Error::Parse(format!("empty range {range}")));
                }
                let mut args = model.clone();
                args.n.get_or_insert((hi.max(1) + 2) as usize);
                let (spec, label) = one_dep(&args)?;
                let k = kernel_stationary(&spec, hi.max(0))?;
                let mut rows = Vec::new();
                let mut obj = Map::new();
                for m in lo..=hi {
                    let v = k.k(m)?;
                    obj.insert(m.to_string(), r(&v));
                    rows.push(vec![m.to_string(), rational::format(&v)]);
                }
                return Ok(Outcome::new()
                    .set("model", json!(label))
                    .set("k", Value::Object(obj))
                    .table(&["m", "k"], rows));
            }
            let (spec, label) = one_dep(model)?;
            let k = site_kernel(&spec)?;
            let rows = kernel_csv(&k)
                .lines()
                .skip(1)
                .map(|l| l.split(',').map(str::to_string).collect())
                .collect();
            Ok(Outcome::new()
                .set("model", json!(label))
                .set("n", json!(spec.horizon()))
                .set("kernel", matrix_json(&k))
                .table(&["row", "col", "value"], rows))
        }
        Command::Counts { model } => {
            let (spec, label) = one_dep(model)?;
            let k = site_kernel(&spec)?;
            let poly = count_polynomial(&k)?;
            let (mean, var) = count_moments(&k)?;
            let scale = Rational::from(rational::lcm_of_denominators(poly.coefficients()));
            let ints: Vec<Rational> = poly.coefficients().iter().map(|c| c * &scale).collect();
            let rows = poly
                .coefficients()
                .iter()
                .zip(&ints)
                .enumerate()
                .map(|(j, (p, i))| vec![j.to_string(), rational::format(p), rational::format(i)])
                .collect();
            Ok(Outcome::new()
                .set("model", json!(label))
                .set("n", json!(spec.horizon()))
                .set("exact", json!({
                    "count_law": rs(poly.coefficients()),
                    "common_denominator": r(&scale),
                    "scaled_coefficients": rs(&ints),
                    "mean_trace": r(&mean),
                    "variance_trace": r(&var),
                }))
                .table(&["j", "probability", "scaled"], rows))
        }
        Command::Stats { model } => {
            let (spec, label) = one_dep(model)?;
            let k = site_kernel(&spec)?;
            let normal = normal_approx_check(&k)?;
            let eig = numeric_eigenvalues(&k)?;
            let rows = vec![
                vec!["approx_sup_distance".into(), format!("{:.12}", normal.approx_sup_distance)],
                vec!["approx_bound".into(), format!("{:.12}", normal.approx_bound)],
                vec!["within_bound".into(), normal.within_bound.to_string()],
                vec!["unimodal".into(), normal.unimodal.to_string()],
                vec!["eigenvalues_exactly_real".into(), eig.exactly_real.to_string()],
            ];
            Ok(Outcome::new()
                .set("model", json!(label))
                .set("n", json!(spec.horizon()))
                .set("exact", json!({
                    "count_law": rs(normal.distribution.coefficients()),
                    "mean": r(&normal.mean),
                    "variance": r(&normal.variance),
                    "mode": normal.mode,
                    "unimodal": normal.unimodal,
                    "eigenvalues_exactly_real": eig.exactly_real,
                }))
                .set("approx", json!({
                    "approx_sigma": normal.approx_sigma,
                    "approx_sup_distance": normal.approx_sup_distance,
                    "approx_bound": normal.approx_bound,
                    "approx_mode_minus_mean": normal.approx_mode_minus_mean,
                    "approx_eigenvalues": eig.eigenvalues.iter().map(|&(re, im)| json!([re, im])).collect::<Vec<_>>(),
                    "approx_eigen_residual": eig.max_residual,
                }))
                .set("gates", json!([{"name": "sup distance within 0.80/sigma", "pass": normal.within_bound}]))
                .table(&["quantity", "value"], rows))
        }
        Command::Simulate { model, reps, seed, uniform_sum } => {
            if *uniform_sum {
                let n = model.n.ok_or_else(|| Error::Parse("--n is required".into()))?;
                let rep = uniform_sum_check(n, *reps, *seed)?;
                let mut out = Outcome::new()
                    .set("model", json!("uniform-sum"))
                    .set("n", json!(n))
                    .set("exact", json!({"floor_sum_law": rs(&rep.exact)}))
                    .set("empirical", json!({"counts": rep.counts, "pathwise_failures": rep.pathwise_failures}))
                    .set("gates", gates_json(&rep.gates))
                    .table(&["gate", "approx_estimate", "approx_target", "approx_se", "approx_z", "pass"], gate_rows(&rep.gates));
                out.exit = if rep.passed() { 0 } else { 1 };
                return Ok(out);
            }
            let src = source(model)?;
            let n = horizon(model, &src)?;
            let (report, spec) = match &src {
                Source::Process(p) => (simulate_process(p, n, *reps, *seed)?, build(p, n)?),
                Source::Group(setup, label) => {
                    (simulate_group_carries(setup, label, n, *reps, *seed)?, carries_spec(setup, n)?)
                }
                _ => return Err(Error::Unsupported("simulation needs a catalog model or a group".into())),
            };
            let (gates, exact) = simulation_gates(&report, &spec)?;
            let mut out = Outcome::new()
                .set("model", json!(report.model))
                .set("n", json!(n))
                .set("exact", Value::Object(exact))
                .set("empirical", empirical_json(&report))
                .set("gates", gates_json(&gates))
                .table(&["gate", "approx_estimate", "approx_target", "approx_se", "approx_z", "pass"], gate_rows(&gates));
            out.exit = if gates.iter().all(|g| g.pass) { 0 } else { 1 };
            Ok(out)
        }
        Command::OracleCheck { model, budget } => oracle_check(model, *budget),
        Command::Oracle { model, budget } => {
            let (m, n) = oracle_model(model)?;
            let d = oracle_distribution(&m, n, *budget)?;
            let rows = d.iter().map(|(p, v)| vec![p.to_string(), rational::format(v)]).collect();
            let obj: Map<String, Value> = d.iter().map(|(p, v)| (p.to_string(), r(v))).collect();
            Ok(Outcome::new()
                .set("n", json!(n))
                .set("distribution", Value::Object(obj))
                .table(&["pattern", "probability"], rows))
        }
        Command::Group { model, column, export } => group(model, column.as_deref(), *export),
        Command::Connectivity { n, perm } => connectivity(*n, perm.as_deref()),
        Command::Validate { model, max_n } => {
            // stationary data must reach the largest horizon checked
            let mut args = model.clone();
            if args.spec.is_none() {
                args.n = Some(args.n.unwrap_or(*max_n).max(*max_n));
            }
            let (spec, label) = one_dep(&args)?;
            let rep = validate_spec(&spec, *max_n)?;
            let negative: Vec<Value> = rep
                .negative
                .iter()
                .map(|(p, v)| json!({"pattern": p.to_string(), "value": r(v)}))
                .collect();
            let bad: Vec<Value> = rep.bad_sums.iter().map(|(n, v)| json!({"n": n, "sum": r(v)})).collect();
            let rows = rep
                .negative
                .iter()
                .map(|(p, v)| vec![p.to_string(), rational::format(v)])
                .collect();
            Ok(Outcome::new()
                .set("model", json!(label))
                .set("valid", json!(rep.is_valid()))
                .set("patterns_checked", json!(rep.patterns_checked))
                .set("negative", Value::Array(negative))
                .set("bad_sums", Value::Array(bad))
                .table(&["pattern", "value"], rows))
        }
        Command::Spec { model } => {
            let (spec, _) = one_dep(model)?;
            let file = SpecFile::from_spec(&spec);
            let v = serde_json::to_value(&file).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Outcome::new().set("spec", v))
        }
    }
}

fn oracle_check(model: &ModelArgs, budget: u128) -> Result<Outcome> {
    let (m, n) = oracle_model(model)?;
    let brute = oracle_distribution(&m, n, budget)?;
    let corr = oracle_correlations(&m, n, budget)?;
    let mut mismatches = Vec::new();
    let mut rows = Vec::new();
    let mut push = |what: String, oracle: &Rational, exact: &Rational| {
        let ok = oracle == exact;
        rows.push(vec![what.clone(), rational::format(oracle), rational::format(exact), ok.to_string()]);
        if !ok {
            mismatches.push(json!({"item": what, "oracle": r(oracle), "determinant": r(exact)}));
        }
    };
    match &m {
        OracleModel::Connectivity => {
            let k = connectivity_kernel(n)?;
            for (a, v) in &corr {
                let mut idx = vec![0];
                idx.extend(a);
                idx.push(n);
                let det = k.principal(&idx).det()?;
                push(format!("rho({})", set_string(a)), v, &det);
            }
        }
        _ => {
            let spec = match &m {
                OracleModel::Process(p) => build(p, n)?,
                OracleModel::Group(s) => carries_spec(s, n)?,
                OracleModel::Connectivity => unreachable!(),
            };
            for (p, v) in &brute {
                push(format!("P({p})"), v, &pattern_probability(&spec, p)?);
            }
            let kernel = spec.kernel()?;
            for (a, v) in &corr {
                push(format!("rho({})", set_string(a)), v, &kernel.minor(a)?);
            }
        }
    }
    let ok = mismatches.is_empty();
    let checked = rows.len();
    let mut out = Outcome::new()
        .set("n", json!(n))
        .set("checked", json!(checked))
        .set("matches", json!(ok))
        .set("mismatches", Value::Array(mismatches))
        .table(&["item", "oracle", "determinant", "equal"], rows);
    out.exit = if ok { 0 } else { 1 };
    Ok(out)
}

fn group(model: &ModelArgs, column: Option<&[String]>, export: bool) -> Result<Outcome> {
    let (setup, label) = match source(model)? {
        Source::Group(s, l) => (s, l),
        _ => return Err(Error::Parse("group needs --model group:<name> or --group-file".into())),
    };
    if export {
        let v = serde_json::to_value(GroupFile::from_setup(&setup)).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(Outcome::new().set("group", v));
    }
    let g = setup.group();
    let rep_names: Vec<String> = setup.reps().iter().map(|&x| g.name(x).to_string()).collect();
    let fs = factor_set(&setup);
    let mut rows = Vec::new();
    let mut table = Map::new();
    for ((s, u), v) in &fs {
        let key = format!("{},{}", rep_names[*s], rep_names[*u]);
        table.insert(key, json!(g.name(*v)));
        rows.push(vec![rep_names[*s].clone(), rep_names[*u].clone(), g.name(*v).to_string()]);
    }
    let len = model.n.unwrap_or(6);
    let mut out = Outcome::new()
        .set("group", json!(label))
        .set("order", json!(g.order()))
        .set("subgroup", json!(setup.subgroup().iter().map(|&x| g.name(x)).collect::<Vec<_>>()))
        .set("representatives", json!(rep_names))
        .set("factor_set", Value::Object(table))
        .set("trivial_factor_set", json!(is_trivial_factor_set(&setup)))
        .set("a", rs(&carries_a_sequence(&setup, len + 1)))
        .table(&["s", "u", "f"], rows);
    if let Some(col) = column {
        let labels = col
            .iter()
            .map(|name| {
                let x = g.index_of(name).ok_or_else(|| Error::Parse(format!("no element named `{name}`")))?;
                setup
                    .reps()
                    .iter()
                    .position(|&rep| rep == x)
                    .ok_or_else(|| Error::Parse(format!("`{name}` is not a representative")))
            })
            .collect::<Result<Vec<_>>>()?;
        let trace = multiply_column(&setup, &labels)?;
        let word: Vec<usize> = labels.iter().map(|&l| setup.reps()[l]).collect();
        let product = g.product(&word);
        let rebuilt = reconstruct_product(&setup, &word)?;
        let carries = trace.carries.iter().filter(|&&c| c != g.identity()).count();
        out = out.set("column", json!({
            "remainders": trace.remainders.iter().map(|&l| rep_names[l].clone()).collect::<Vec<_>>(),
            "carries": trace.carries.iter().map(|&c| g.name(c)).collect::<Vec<_>>(),
            "nontrivial_carries": carries,
            "product": g.name(product),
            "product_from_carries": g.name(rebuilt),
        }));
    }
    Ok(out)
}

fn connectivity(n: usize, perm: Option<&[usize]>) -> Result<Outcome> {
    let k = connectivity_kernel(n)?;
    let q = q_closed_form(n);
    let mut out = Outcome::new()
        .set("n", json!(n))
        .set("kernel", matrix_json(&k))
        .set("q", matrix_json(&q));
    let expected: Rational = (1..n).map(|i| containing_probability(n, &[i])).sum::<Result<Rational>>()?;
    out = out.set("expected_size", r(&expected));
    if n <= 16 {
        let mut rows = Vec::new();
        for mask in 0u64..1 << (n - 1) {
            let s: Vec<usize> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
            rows.push(vec![set_string(&s), rational::format(&containing_probability(n, &s)?)]);
        }
        out = out.table(&["set", "probability_contained"], rows);
    }
    if let Some(p) = perm {
        let mut sorted = p.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::Parse(format!("--perm is not a permutation of 1..{n}")));
        }
        let zero_based: Vec<usize> = p.iter().map(|v| v - 1).collect();
        out = out.set("connectivity_set", json!(connectivity_set(&zero_based)));
    }
    Ok(out)
}

fn render(cli: &Cli, outcome: &Outcome) -> Result<String> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Oracle { .. } => Format::Csv,
        _ => Format::Json,
    });
    let config = serde_json::to_value(&cli.command).map_err(|e| Error::Parse(e.to_string()))?;
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("header".into(), json!({"tool": "onedep", "version": VERSION, "config": config}));
            doc.extend(outcome.fields.clone());
            let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = outcome
                .table
                .as_ref()
                .ok_or_else(|| Error::Parse(format!("{} has no csv form", cli.command.name())))?;
            let mut s = format!("# onedep {VERSION}\n# config {config}\n");
            s.push_str(&table.header.join(","));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Runs the command line and returns the exit code: 0 on success, 1 on an
/// oracle mismatch or failed gate, 2 on usage or input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|o| Ok((render(&cli, &o)?, o.exit)));
    match result {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
