//! Run configuration, machine-readable reports and ε sweeps.
//!
//! Reports and sweep summaries are plain serde structs. Floats are written
//! by `serde_json` in shortest round-trip form and every map is a
//! `BTreeMap`, so identical inputs give byte-identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::functional::ProblemParams;
use crate::graph::{Domain, GraphFile, WeightedGraph};
use crate::operators::{assemble_form, BiharmonicForm, VertexFunction};
use crate::solvers::{
    certify, two_solutions_with_constants, Certificate, CriticalPoint, PointKind, SolverConfig,
    TwoSolutions,
};
use crate::spectrum::{compute_constants, ConstantsReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of sweep CSV files.
pub const CSV_HEADER: [&str; 10] = [
    "eps",
    "energy_u0",
    "energy_uc",
    "norm_h_u0",
    "norm_h_uc",
    "residual_u0",
    "residual_uc",
    "in_regime",
    "certified",
    "error",
];

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("`{s}` is not a finite number")))
}

/// `factor * symbol`, `symbol * factor`, `symbol`, or an absolute number.
fn parse_relative(s: &str, symbol: &str) -> Result<(f64, bool)> {
    let s = s.trim();
    if s == symbol {
        return Ok((1.0, true));
    }
    if let Some((a, b)) = s.split_once('*') {
        let (a, b) = (a.trim(), b.trim());
        return match (a == symbol, b == symbol) {
            (false, true) => Ok((parse_number(a)?, true)),
            (true, false) => Ok((parse_number(b)?, true)),
            _ => Err(Error::Parse(format!("cannot parse `{s}`"))),
        };
    }
    Ok((parse_number(s)?, false))
}

/// `λ` as an absolute value or a multiple of `λ₁` (`"0.5*lambda1"`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Absolute(f64),
    Relative(f64),
}

impl LambdaSpec {
    pub fn resolve(self, lambda1: f64) -> f64 {
        match self {
            LambdaSpec::Absolute(v) => v,
            LambdaSpec::Relative(c) => c * lambda1,
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match parse_relative(s, "lambda1")? {
            (c, true) => LambdaSpec::Relative(c),
            (v, false) => LambdaSpec::Absolute(v),
        })
    }
}

/// `ε` as an absolute value or a multiple of `ε̂₁` (`"0.5*eps1"`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsSpec {
    Absolute(f64),
    Relative(f64),
}

impl EpsSpec {
    pub fn resolve(self, eps1_hat: Option<f64>) -> Result<f64> {
        match (self, eps1_hat) {
            (EpsSpec::Absolute(v), _) => Ok(v),
            (EpsSpec::Relative(c), Some(e1)) => Ok(c * e1),
            (EpsSpec::Relative(_), None) => Err(Error::InvalidParams(
                "ε relative to ε̂₁ requested but ε̂₁ is undefined (λ ≥ λ₁)".into(),
            )),
        }
    }
}

impl FromStr for EpsSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match parse_relative(s, "eps1")? {
            (c, true) => EpsSpec::Relative(c),
            (v, false) => EpsSpec::Absolute(v),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// `MIN:MAX:COUNT:log|lin`; endpoints accept [`EpsSpec`] syntax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsGrid {
    pub min: EpsSpec,
    pub max: EpsSpec,
    pub count: usize,
    pub spacing: Spacing,
}

impl FromStr for EpsGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count, spacing] = parts[..] else {
            return Err(Error::Parse(format!(
                "eps grid `{s}` must be MIN:MAX:COUNT:log|lin"
            )));
        };
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("grid count `{count}` is not an integer")))?;
        let spacing = match spacing.trim() {
            "log" => Spacing::Logarithmic,
            "lin" => Spacing::Linear,
            other => {
                return Err(Error::Parse(format!(
                    "grid spacing `{other}` is not log or lin"
                )))
            }
        };
        Ok(EpsGrid {
            min: min.parse()?,
            max: max.parse()?,
            count,
            spacing,
        })
    }
}

impl EpsGrid {
    /// Grid values with both endpoints reproduced exactly.
    pub fn values(&self, eps1_hat: Option<f64>) -> Result<Vec<f64>> {
        let lo = self.min.resolve(eps1_hat)?;
        let hi = self.max.resolve(eps1_hat)?;
        if self.count == 0 || !(lo <= hi) {
            return Err(Error::InvalidParams(format!(
                "empty eps grid [{lo}, {hi}] with {} points",
                self.count
            )));
        }
        if self.count == 1 {
            return Ok(vec![lo]);
        }
        if self.spacing == Spacing::Logarithmic && !(lo > 0.0) {
            return Err(Error::InvalidParams(
                "logarithmic eps grid needs MIN > 0".into(),
            ));
        }
        let last = self.count - 1;
        Ok((0..self.count)
            .map(|k| {
                if k == 0 {
                    return lo;
                }
                if k == last {
                    return hi;
                }
                let t = k as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => lo + t * (hi - lo),
                    Spacing::Logarithmic => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
                }
            })
            .collect())
    }
}

/// Forcing `f` on `Ω`: `const:c`, `vertex:id:c`, or a JSON file mapping
/// vertex ids to values (`file:path` or a bare path). Unlisted interior
/// vertices get 0.
#[derive(Debug, Clone, PartialEq)]
pub enum FSpec {
    Constant(f64),
    Vertex(String, f64),
    File(PathBuf),
}

impl FromStr for FSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(FSpec::Constant(parse_number(rest)?));
        }
        if let Some(rest) = s.strip_prefix("vertex:") {
            let (id, value) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("`{s}` must be vertex:ID:VALUE")))?;
            return Ok(FSpec::Vertex(id.to_string(), parse_number(value)?));
        }
        let path = s.strip_prefix("file:").unwrap_or(s);
        Ok(FSpec::File(PathBuf::from(path)))
    }
}

impl FSpec {
    pub fn resolve(&self, g: &WeightedGraph, d: &Domain) -> Result<VertexFunction> {
        let position = |id: &str| -> Result<usize> {
            let i = g
                .index_of(id)
                .ok_or_else(|| Error::UnknownVertex(id.into()))?;
            d.interior_index(i).ok_or_else(|| {
                Error::InvalidParams(format!("forcing vertex `{id}` is not interior"))
            })
        };
        match self {
            FSpec::Constant(c) => Ok(VertexFunction::constant(d.n(), *c)),
            FSpec::Vertex(id, c) => Ok(VertexFunction::indicator(d.n(), position(id)?).scaled(*c)),
            FSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                let map: BTreeMap<String, f64> =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                let mut values = vec![0.0; d.n()];
                for (id, v) in map {
                    values[position(&id)?] = v;
                }
                let f = VertexFunction::new(values);
                if f.is_finite() {
                    Ok(f)
                } else {
                    Err(Error::NonFinite)
                }
            }
        }
    }
}

/// A loaded graph with its domain and assembled form.
#[derive(Debug, Clone)]
pub struct Problem {
    pub graph: WeightedGraph,
    pub domain: Domain,
    pub form: BiharmonicForm,
}

impl Problem {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = GraphFile::read(path)?;
        let domain = file.domain()?;
        Problem::new(file.graph, domain)
    }

    pub fn new(graph: WeightedGraph, domain: Domain) -> Result<Self> {
        let form = assemble_form(&graph, &domain)?;
        Ok(Problem {
            graph,
            domain,
            form,
        })
    }

    /// Interior values keyed by vertex id.
    pub fn keyed(&self, u: &VertexFunction) -> BTreeMap<String, f64> {
        self.domain
            .interior()
            .iter()
            .cloned()
            .zip(u.values().iter().copied())
            .collect()
    }

    pub fn unkeyed(&self, values: &BTreeMap<String, f64>) -> Result<VertexFunction> {
        self.domain
            .interior()
            .iter()
            .map(|id| {
                values
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::Parse(format!("report lacks a value for `{id}`")))
            })
            .collect::<Result<Vec<f64>>>()
            .map(VertexFunction::new)
    }
}

/// Diagnostics printed by `check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub vertices: usize,
    pub edges: usize,
    pub n: usize,
    pub m: usize,
    pub connected: bool,
    pub measure_range: (f64, f64),
    pub weight_range: (f64, f64),
}

impl fmt::Display for CheckSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}  edges: {}", self.vertices, self.edges)?;
        writeln!(f, "interior |Ω| = n = {}", self.n)?;
        writeln!(f, "boundary |∂Ω| = {}", self.m - self.n)?;
        writeln!(f, "effective |Ω ∪ ∂Ω| = m = {}", self.m)?;
        writeln!(f, "connected: {}", self.connected)?;
        writeln!(
            f,
            "mu in [{}, {}]",
            self.measure_range.0, self.measure_range.1
        )?;
        write!(f, "w in [{}, {}]", self.weight_range.0, self.weight_range.1)
    }
}

pub fn check_graph(path: impl AsRef<Path>) -> Result<CheckSummary> {
    let problem = Problem::load(path)?;
    Ok(CheckSummary {
        vertices: problem.graph.len(),
        edges: problem.graph.num_edges(),
        n: problem.domain.n(),
        m: problem.domain.m(),
        connected: true,
        measure_range: problem.graph.measure_range(),
        weight_range: problem.graph.weight_range(),
    })
}

/// Everything a `constants`, `solve` or `sweep` run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph_path: PathBuf,
    pub lambda: LambdaSpec,
    pub p: f64,
    pub eps: Option<EpsSpec>,
    pub eps_grid: Option<EpsGrid>,
    pub f: FSpec,
    pub solver: SolverConfig,
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(graph_path: impl Into<PathBuf>, lambda: LambdaSpec, p: f64, f: FSpec) -> Self {
        RunConfig {
            graph_path: graph_path.into(),
            lambda,
            p,
            eps: None,
            eps_grid: None,
            f,
            solver: SolverConfig::default(),
            execution: Execution::default(),
        }
    }
}

/// JSON written by `constants`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsOutput {
    pub schema_version: u32,
    pub constants: ConstantsReport,
    pub seed: u64,
    pub version: String,
}

pub struct Prepared {
    pub problem: Problem,
    pub f: VertexFunction,
    pub constants: ConstantsReport,
}

/// Loads the graph, resolves `λ` and `f`, and computes the constants.
/// Does not require `λ < λ₁`.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let problem = Problem::load(&cfg.graph_path)?;
    let f = cfg.f.resolve(&problem.graph, &problem.domain)?;
    let lambda1 = crate::spectrum::lambda1(&problem.form)?;
    let lambda = cfg.lambda.resolve(lambda1);
    let constants = compute_constants(
        &problem.form,
        lambda,
        cfg.p,
        &f,
        cfg.solver.seed,
        cfg.execution,
    )?;
    Ok(Prepared {
        problem,
        f,
        constants,
    })
}

pub fn run_constants(cfg: &RunConfig) -> Result<ConstantsOutput> {
    let prepared = prepare(cfg)?;
    Ok(ConstantsOutput {
        schema_version: SCHEMA_VERSION,
        constants: prepared.constants,
        seed: cfg.solver.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConstants {
    pub lambda: f64,
    pub lambda1: f64,
    pub tau: f64,
    pub p: f64,
    pub embedding_lower: f64,
    pub embedding_upper: f64,
    pub chain_constant: f64,
    pub f_dual_norm: f64,
    pub eps1_hat: Option<f64>,
    pub eps: f64,
    pub r_eps: f64,
    pub delta_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBlock {
    pub kind: PointKind,
    pub values: BTreeMap<String, f64>,
    pub energy: f64,
    pub norm_h: f64,
    pub residual: f64,
    pub identity_gap: f64,
    pub iterations: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimax {
    /// Highest node energy on the final path (upper estimate of `c`).
    pub c_est: f64,
    pub straight_path_max: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distinctness {
    pub energy_gap: f64,
    pub h_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub path_nodes: usize,
    pub newton_max: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub schema_version: u32,
    pub constants: ReportConstants,
    pub local_min: SolutionBlock,
    pub mountain_pass: SolutionBlock,
    pub minimax: Minimax,
    pub distinctness: Distinctness,
    pub certificate: Certificate,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl SolutionReport {
    /// Packages a pipeline result. Energies, residuals and certificate
    /// flags are recomputed here from the solution vectors.
    pub fn build(
        problem: &Problem,
        params: &ProblemParams,
        out: &TwoSolutions,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        let form = &problem.form;
        let c = &out.constants;
        let (certificate, c0, cc) = certify(
            form,
            params,
            c,
            &out.local_min.u,
            &out.mountain_pass.u,
            cfg.tol,
        )?;
        let block =
            |cp: &CriticalPoint, checks: &crate::solvers::PointChecks, ok: bool| SolutionBlock {
                kind: cp.kind,
                values: problem.keyed(&cp.u),
                energy: checks.energy,
                norm_h: checks.norm_h,
                residual: checks.residual,
                identity_gap: checks.identity_gap,
                iterations: cp.iterations,
                certified: ok,
            };
        let diff = out.mountain_pass.u.as_vector() - out.local_min.u.as_vector();

        let mut notes = Vec::new();
        if !certificate.in_regime {
            notes.push("out of guaranteed regime: uncertified".to_string());
        }
        if certificate.trivial_local_min {
            notes.push("trivial at eps=0: u0 = 0".to_string());
        }
        if out.direction_source == crate::solvers::DirectionSource::Eigenfunction {
            notes.push("f = 0: descent direction taken from the first eigenfunction".to_string());
        }

        Ok(SolutionReport {
            schema_version: SCHEMA_VERSION,
            constants: ReportConstants {
                lambda: c.lambda,
                lambda1: c.lambda1,
                tau: c.tau,
                p: c.p,
                embedding_lower: c.embedding.lower,
                embedding_upper: c.embedding.upper,
                chain_constant: c.chain_constant,
                f_dual_norm: c.f_dual_norm,
                eps1_hat: c.eps1_hat,
                eps: params.eps(),
                r_eps: params.r_eps(),
                delta_eps: params.delta_eps(),
            },
            local_min: block(&out.local_min, &c0, certificate.local_min),
            mountain_pass: block(&out.mountain_pass, &cc, certificate.mountain_pass),
            minimax: Minimax {
                c_est: out.c_est,
                straight_path_max: out.straight_path_max,
                restarts: out.restarts,
            },
            distinctness: Distinctness {
                energy_gap: cc.energy - c0.energy,
                h_distance: form.h_norm(&diff),
            },
            certificate,
            notes,
            provenance: Provenance {
                seed: cfg.seed,
                tol: cfg.tol,
                max_iter: cfg.max_iter,
                path_nodes: cfg.path_nodes,
                newton_max: cfg.newton_max,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        })
    }

    /// Re-derives the certificate from the values stored in the report.
    pub fn verify(
        &self,
        problem: &Problem,
        params: &ProblemParams,
        constants: &ConstantsReport,
    ) -> Result<Certificate> {
        let u0 = problem.unkeyed(&self.local_min.values)?;
        let uc = problem.unkeyed(&self.mountain_pass.values)?;
        certify(
            &problem.form,
            params,
            constants,
            &u0,
            &uc,
            self.provenance.tol,
        )
        .map(|c| c.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Resolves `ε` and builds validated problem parameters.
pub fn params_for(prepared: &Prepared, eps: f64) -> Result<ProblemParams> {
    ProblemParams::new(
        prepared.constants.lambda,
        prepared.constants.p,
        eps,
        prepared.f.clone(),
        prepared.constants.lambda1,
    )
}

/// Full `solve` run: returns the parameters alongside the report.
pub fn run_solve(cfg: &RunConfig) -> Result<(Prepared, ProblemParams, SolutionReport)> {
    cfg.solver.validate()?;
    let prepared = prepare(cfg)?;
    let eps_spec = cfg
        .eps
        .ok_or_else(|| Error::InvalidParams("solve needs --eps".into()))?;
    let eps = eps_spec.resolve(prepared.constants.eps1_hat)?;
    let params = params_for(&prepared, eps)?;
    let out = two_solutions_with_constants(
        &prepared.problem.form,
        &params,
        &prepared.constants,
        &cfg.solver,
    )?;
    let report = SolutionReport::build(&prepared.problem, &params, &out, &cfg.solver)?;
    Ok((prepared, params, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub energy_u0: Option<f64>,
    pub energy_uc: Option<f64>,
    pub norm_h_u0: Option<f64>,
    pub norm_h_uc: Option<f64>,
    pub residual_u0: Option<f64>,
    pub residual_uc: Option<f64>,
    pub in_regime: bool,
    pub certified: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub constants: ConstantsReport,
    pub eps1_hat: Option<f64>,
    pub row_count: usize,
    pub certified_rows: usize,
    /// Largest grid `ε` whose row is fully certified.
    pub largest_certified_eps: Option<f64>,
    /// Diagnostic only: whether `J(u₀)` was nonincreasing along the grid.
    pub energy_u0_nonincreasing: bool,
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub version: String,
}

/// Runs the two-solution pipeline at every grid value. Rows are
/// independent and seeded `seed + row`; failures are recorded in-row.
pub fn sweep(
    problem: &Problem,
    base: &ProblemParams,
    constants: &ConstantsReport,
    grid: &[f64],
    cfg: &SolverConfig,
    exec: Execution,
) -> Vec<SweepRow> {
    exec.map_indexed(grid.len(), |row| {
        let eps = grid[row];
        let row_cfg = SolverConfig {
            seed: cfg.seed.wrapping_add(row as u64),
            ..cfg.clone()
        };
        let result = base.with_eps(eps).and_then(|params| {
            let out = two_solutions_with_constants(&problem.form, &params, constants, &row_cfg)?;
            let (cert, c0, cc) = certify(
                &problem.form,
                &params,
                constants,
                &out.local_min.u,
                &out.mountain_pass.u,
                cfg.tol,
            )?;
            Ok((cert, c0, cc))
        });
        match result {
            Ok((cert, c0, cc)) => SweepRow {
                eps,
                energy_u0: Some(c0.energy),
                energy_uc: Some(cc.energy),
                norm_h_u0: Some(c0.norm_h),
                norm_h_uc: Some(cc.norm_h),
                residual_u0: Some(c0.residual),
                residual_uc: Some(cc.residual),
                in_regime: cert.in_regime,
                certified: cert.certified,
                error: None,
            },
            Err(e) => SweepRow {
                eps,
                energy_u0: None,
                energy_uc: None,
                norm_h_u0: None,
                norm_h_uc: None,
                residual_u0: None,
                residual_uc: None,
                in_regime: eps > 0.0 && constants.eps1_hat.is_some_and(|e1| eps <= e1),
                certified: false,
                error: Some(e.to_string()),
            },
        }
    })
}

pub fn summarize(constants: &ConstantsReport, rows: Vec<SweepRow>, seed: u64) -> SweepSummary {
    let largest_certified_eps = rows
        .iter()
        .filter(|r| r.certified)
        .map(|r| r.eps)
        .fold(None, |acc: Option<f64>, e| {
            Some(acc.map_or(e, |a| a.max(e)))
        });
    let energies: Vec<f64> = rows.iter().filter_map(|r| r.energy_u0).collect();
    SweepSummary {
        schema_version: SCHEMA_VERSION,
        constants: constants.clone(),
        eps1_hat: constants.eps1_hat,
        row_count: rows.len(),
        certified_rows: rows.iter().filter(|r| r.certified).count(),
        largest_certified_eps,
        energy_u0_nonincreasing: energies.windows(2).all(|w| w[1] <= w[0]),
        rows,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepSummary> {
    cfg.solver.validate()?;
    let prepared = prepare(cfg)?;
    let grid_spec = cfg
        .eps_grid
        .ok_or_else(|| Error::InvalidParams("sweep needs --eps-grid".into()))?;
    let grid = grid_spec.values(prepared.constants.eps1_hat)?;
    let base = params_for(&prepared, grid[0])?;
    let rows = sweep(
        &prepared.problem,
        &base,
        &prepared.constants,
        &grid,
        &cfg.solver,
        cfg.execution,
    );
    Ok(summarize(&prepared.constants, rows, cfg.solver.seed))
}

fn csv_float(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(to_err)?;
    for r in rows {
        w.write_record([
            format!("{:e}", r.eps),
            csv_float(r.energy_u0),
            csv_float(r.energy_uc),
            csv_float(r.norm_h_u0),
            csv_float(r.norm_h_uc),
            csv_float(r.residual_u0),
            csv_float(r.residual_uc),
            r.in_regime.to_string(),
            r.certified.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}
