//! Batch campaigns behind the `cqnet` binary. Each campaign validates its
//! parameters, runs, and produces one JSON report plus an exit status.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crossed_cube::diagnosis::{self, DiagnosisModel, DEFAULT_PAIR_BUDGET};
use crossed_cube::structure::extra::{self, CutCensusTally, MinCutCensus, DEFAULT_SUBSET_BUDGET};
use crossed_cube::structure::lemmas::{self, LemmaSweepReport, LemmaTally};
use crossed_cube::sweep::{Checkpoint, SweepControl};
use crossed_cube::topology::{self, MAX_RECURSIVE_DIMENSION};
use crossed_cube::{extremal, CrossedCube, Dimension, Error as CoreError, Refusal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed checkpoint {path}: {source}")]
    Checkpoint { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Counterexample = 1,
    Incomplete = 2,
    Usage = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Edges,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnoseMode {
    Exhaustive,
    Witness,
    Bracket,
}

#[derive(Debug, Clone)]
pub enum Command {
    Gen { format: ExportFormat },
    VerifyTopology,
    Classify { size: usize },
    ExtraConn { g: u32 },
    MinCuts { g: u32, size: usize },
    Witness,
    Diagnose { g: u32, t: Option<usize>, model: DiagnosisModel, mode: DiagnoseMode },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::VerifyTopology => "verify-topology",
            Command::Classify { .. } => "classify",
            Command::ExtraConn { .. } => "extra-conn",
            Command::MinCuts { .. } => "min-cuts",
            Command::Witness => "witness",
            Command::Diagnose { .. } => "diagnose",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub command: Command,
    pub n: u32,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
    pub budget: Option<u64>,
    /// Checkpoint written after every batch of a sweep.
    pub checkpoint: Option<PathBuf>,
    /// Checkpoint to continue from; also the file further progress is saved to.
    pub resume: Option<PathBuf>,
    /// Stop sweeps after this many batches, leaving a checkpoint.
    pub halt_after: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: String,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile<T> {
    command: String,
    n: u32,
    g: Option<u32>,
    size: usize,
    checkpoint: Checkpoint<T>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn refusal_report(campaign: &Campaign, r: &Refusal, elapsed_ms: u128) -> Value {
    json!({
        "command": campaign.command.name(),
        "n": campaign.n,
        "status": "refused",
        "needed": r.needed.to_string(),
        "budget": r.budget,
        "lower": r.lower,
        "upper": r.upper,
        "elapsed_ms": elapsed_ms,
    })
}

impl Campaign {
    fn validate(&self) -> Result<Dimension> {
        let dim = Dimension::new(self.n).map_err(|e| CliError::Usage(e.to_string()))?;
        if self.workers == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        if self.resume.is_some() && self.checkpoint.is_some() && self.resume != self.checkpoint {
            return Err(CliError::Usage("--resume and --checkpoint name different files".into()));
        }
        let needs_mask = matches!(self.command, Command::Classify { .. } | Command::MinCuts { .. });
        if needs_mask && self.n > 6 {
            return Err(CliError::Usage(format!("{} supports n <= 6", self.command.name())));
        }
        match self.command {
            Command::VerifyTopology if self.n > MAX_RECURSIVE_DIMENSION => Err(CliError::Usage(format!(
                "verify-topology supports n <= {MAX_RECURSIVE_DIMENSION}"
            ))),
            Command::Witness if self.n < 4 => Err(CliError::Usage("witness needs n >= 4".into())),
            Command::Diagnose { mode: DiagnoseMode::Exhaustive, .. } if self.n > 6 => {
                Err(CliError::Usage("exhaustive diagnosis supports n <= 6".into()))
            }
            _ => Ok(dim),
        }
    }

    fn checkpoint_path(&self) -> Option<&Path> {
        self.resume.as_deref().or(self.checkpoint.as_deref())
    }

    fn control(&self) -> SweepControl {
        SweepControl { halt_after_batches: self.halt_after, ..SweepControl::default() }
    }

    fn load<T: for<'de> Deserialize<'de>>(&self, g: Option<u32>, size: usize) -> Result<Option<Checkpoint<T>>> {
        let Some(path) = &self.resume else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let file: CheckpointFile<T> =
            serde_json::from_str(&text).map_err(|source| CliError::Checkpoint { path: path.clone(), source })?;
        if file.command != self.command.name() || file.n != self.n || file.g != g || file.size != size {
            return Err(CliError::Usage(format!(
                "checkpoint is for {} n={} g={:?} size={}",
                file.command, file.n, file.g, file.size
            )));
        }
        Ok(Some(file.checkpoint))
    }

    fn saver<'a, T: Serialize + Clone>(
        &'a self,
        g: Option<u32>,
        size: usize,
        failure: &'a mut Option<CliError>,
    ) -> impl FnMut(&Checkpoint<T>) + 'a {
        move |cp: &Checkpoint<T>| {
            let Some(path) = self.checkpoint_path() else {
                return;
            };
            let file = CheckpointFile { command: self.command.name().into(), n: self.n, g, size, checkpoint: cp.clone() };
            let tmp = path.with_extension("tmp");
            let written = fs::write(&tmp, to_json(&file)).and_then(|_| fs::rename(&tmp, path));
            if let Err(e) = written {
                failure.get_or_insert(CliError::Io { path: path.to_path_buf(), source: e });
            }
        }
    }
}

/// Runs a campaign, writing the report to `--out` when given.
pub fn run(campaign: &Campaign) -> Result<Outcome> {
    let dim = campaign.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(campaign.workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let outcome = pool.install(|| execute(campaign, dim))?;
    if let Some(path) = &campaign.out {
        fs::write(path, &outcome.report).map_err(io_err(path))?;
    }
    Ok(outcome)
}

fn execute(campaign: &Campaign, dim: Dimension) -> Result<Outcome> {
    let start = Instant::now();
    let elapsed = || start.elapsed().as_millis();
    let cube = CrossedCube::flat(dim);
    let ok = |report: String| Outcome { status: ExitStatus::Ok, report };
    let refused = |r: &Refusal, ms| Outcome { status: ExitStatus::Incomplete, report: to_json(&refusal_report(campaign, r, ms)) };

    match campaign.command {
        Command::Gen { format } => Ok(ok(match format {
            ExportFormat::Edges => topology::export_edge_list(&cube),
            ExportFormat::Dot => topology::export_dot(&cube),
            ExportFormat::Json => to_json(&topology::descriptor(&cube)),
        })),

        Command::VerifyTopology => {
            let flat = cube.edges();
            let recursive = {
                let mut e = topology::build_recursive(dim)?;
                e.sort_unstable();
                e
            };
            let regular = (0..cube.vertex_count() as u32).all(|u| cube.neighbor_labels(u).count() == dim.get() as usize);
            let matching = cube.cross_edges().is_perfect(dim);
            let triangle_free = topology::is_triangle_free(&cube);
            let identical = flat == recursive;
            let passed = identical && regular && flat.len() == dim.edge_count() && (dim.get() < 2 || matching);
            let report = json!({
                "command": "verify-topology",
                "n": dim.get(),
                "flat_edges": flat.len(),
                "recursive_edges": recursive.len(),
                "expected_edges": dim.edge_count(),
                "identical": identical,
                "regular": regular,
                "cross_edges_perfect_matching": matching,
                "triangle_free": triangle_free,
                "passed": passed,
                "elapsed_ms": elapsed(),
            });
            let status = if passed { ExitStatus::Ok } else { ExitStatus::Counterexample };
            Ok(Outcome { status, report: to_json(&report) })
        }

        Command::Classify { size } => {
            let budget = campaign.budget.unwrap_or(DEFAULT_SUBSET_BUDGET);
            let (lemma, plan) = match lemmas::sweep_plan(&cube, size, budget) {
                Ok(p) => p,
                Err(CoreError::BudgetExceeded(r)) => return Ok(refused(&r, elapsed())),
                Err(e) => return Err(e.into()),
            };
            let start_cp = campaign.load::<LemmaTally>(None, size)?.unwrap_or_else(|| Checkpoint::start(plan));
            let mut failure = None;
            let cp = lemmas::continue_sweep(&cube, lemma, start_cp, campaign.control(), campaign.saver(None, size, &mut failure))?;
            if let Some(e) = failure {
                return Err(e);
            }
            let report = LemmaSweepReport::from_checkpoint(&cube, lemma, &cp);
            let status = if !report.complete {
                ExitStatus::Incomplete
            } else if report.is_clean() {
                ExitStatus::Ok
            } else {
                ExitStatus::Counterexample
            };
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["command"] = json!("classify");
            value["elapsed_ms"] = json!(elapsed());
            Ok(Outcome { status, report: to_json(&value) })
        }

        Command::ExtraConn { g } => {
            let budget = campaign.budget.unwrap_or(DEFAULT_SUBSET_BUDGET);
            match extra::extra_connectivity(&cube, g, budget) {
                Ok(r) => Ok(ok(to_json(&json!({
                    "command": "extra-conn",
                    "n": dim.get(),
                    "g": g,
                    "status": "exact",
                    "value": r.value,
                    "witness": r.witness.to_binary_labels(),
                    "witness_decimal": r.witness.labels().collect::<Vec<_>>(),
                    "lower_bound": r.lower_bound,
                    "upper_bound": r.upper_bound,
                    "subsets_examined": r.subsets_examined.to_string(),
                    "elapsed_ms": elapsed(),
                })))),
                Err(CoreError::BudgetExceeded(r)) => Ok(refused(&r, elapsed())),
                Err(e) => Err(e.into()),
            }
        }

        Command::MinCuts { g, size } => {
            let budget = campaign.budget.unwrap_or(DEFAULT_SUBSET_BUDGET);
            let plan = match extra::census_plan(&cube, size, budget) {
                Ok(p) => p,
                Err(CoreError::BudgetExceeded(r)) => return Ok(refused(&r, elapsed())),
                Err(e) => return Err(e.into()),
            };
            let start_cp =
                campaign.load::<CutCensusTally>(Some(g), size)?.unwrap_or_else(|| Checkpoint::start(plan));
            let mut failure = None;
            let cp = extra::continue_census(&cube, g, start_cp, campaign.control(), campaign.saver(Some(g), size, &mut failure))?;
            if let Some(e) = failure {
                return Err(e);
            }
            let census = MinCutCensus::from_checkpoint(&cube, g, &cp);
            let mut value = serde_json::to_value(&census).expect("census serializes");
            value["command"] = json!("min-cuts");
            value["complete"] = json!(cp.is_complete());
            value["visited"] = json!(cp.visited());
            value["elapsed_ms"] = json!(elapsed());
            let status = if cp.is_complete() { ExitStatus::Ok } else { ExitStatus::Incomplete };
            Ok(Outcome { status, report: to_json(&value) })
        }

        Command::Witness => {
            let bundle = extremal::witness_bundle(dim)?;
            let mut value = serde_json::to_value(bundle.report()).expect("bundle serializes");
            value["command"] = json!("witness");
            value["a_decimal"] = json!(bundle.a.labels().collect::<Vec<_>>());
            value["elapsed_ms"] = json!(elapsed());
            Ok(ok(to_json(&value)))
        }

        Command::Diagnose { g, t, model, mode } => diagnose(campaign, &cube, g, t, model, mode, elapsed),
    }
}

fn diagnose(
    campaign: &Campaign,
    cube: &CrossedCube,
    g: u32,
    t: Option<usize>,
    model: DiagnosisModel,
    mode: DiagnoseMode,
    elapsed: impl Fn() -> u128,
) -> Result<Outcome> {
    let budget = campaign.budget.unwrap_or(DEFAULT_PAIR_BUDGET);
    let base = json!({
        "command": "diagnose",
        "n": cube.n(),
        "g": g,
        "model": model,
        "t": t,
        "seed": campaign.seed,
    });
    let finish = |mut value: Value, status| {
        value["elapsed_ms"] = json!(elapsed());
        Ok(Outcome { status, report: to_json(&value) })
    };
    let mut value = base;
    match (mode, t) {
        (DiagnoseMode::Exhaustive, Some(t)) => match diagnosis::is_g_extra_t_diagnosable(cube, g, t, model, budget) {
            Ok(v) => {
                value["mode"] = json!("exhaustive");
                value["verdict"] = json!(if v.diagnosable { "diagnosable" } else { "not-diagnosable" });
                value["witness"] = json!(v.witness.as_ref().map(|p| p.report()));
                value["syndrome_check"] = json!(v.witness.as_ref().and_then(|p| syndrome_check(cube, p, model, campaign.seed)));
                value["pairs_checked"] = json!(v.pairs_checked);
                value["faulty_sets"] = json!(v.faulty_sets);
                finish(value, if v.diagnosable { ExitStatus::Ok } else { ExitStatus::Counterexample })
            }
            Err(CoreError::BudgetExceeded(r)) => {
                let mut refusal = refusal_report(campaign, &r, elapsed());
                refusal["model"] = json!(model);
                refusal["g"] = json!(g);
                refusal["t"] = json!(t);
                finish(refusal, ExitStatus::Incomplete)
            }
            Err(e) => Err(e.into()),
        },
        (DiagnoseMode::Witness, _) => {
            let pairs = diagnosis::witness_pairs(cube, g, model)?;
            let best = diagnosis::best_witness_pair(&pairs).ok_or_else(|| CliError::Usage("no indistinguishable pair of faulty sets".into()))?;
            value["mode"] = json!("witness");
            value["upper"] = json!(best.max_len() - 1);
            value["witness"] = json!(best.report());
            value["syndrome_check"] = json!(syndrome_check(cube, best, model, campaign.seed));
            value["pairs"] = json!(pairs.iter().map(|p| p.report()).collect::<Vec<_>>());
            let status = match t {
                Some(t) if best.max_len() <= t => {
                    value["verdict"] = json!("not-diagnosable");
                    ExitStatus::Counterexample
                }
                Some(_) => {
                    value["verdict"] = json!("undetermined");
                    ExitStatus::Incomplete
                }
                None => ExitStatus::Ok,
            };
            finish(value, status)
        }
        (DiagnoseMode::Exhaustive, None) | (DiagnoseMode::Bracket, _) => {
            let pair_budget = if mode == DiagnoseMode::Bracket { 0 } else { budget };
            let d = diagnosis::extra_diagnosability(cube, g, model, pair_budget, None)?;
            let mut status = ExitStatus::Ok;
            value["mode"] = json!(if mode == DiagnoseMode::Bracket { "bracket" } else { "exhaustive" });
            value["result"] = serde_json::to_value(&d).expect("report serializes");
            if let Some(t) = t {
                let verdict = if t <= d.lower.value {
                    "diagnosable"
                } else if t > d.upper {
                    status = ExitStatus::Counterexample;
                    "not-diagnosable"
                } else {
                    status = ExitStatus::Incomplete;
                    "undetermined"
                };
                value["verdict"] = json!(verdict);
            }
            if mode == DiagnoseMode::Exhaustive && !d.exhaustive {
                status = ExitStatus::Incomplete;
            }
            finish(value, status)
        }
    }
}

/// For an indistinguishable pair on a small cube: a syndrome drawn for the
/// first set, and whether the syndrome-space oracle finds a shared one.
fn syndrome_check(cube: &CrossedCube, pair: &diagnosis::FaultPair, model: DiagnosisModel, seed: u64) -> Option<Value> {
    if cube.n() > 10 {
        return None;
    }
    let s = diagnosis::generate_syndrome(cube, &pair.first, model, seed).ok()?;
    let shared = !diagnosis::oracle_distinguishable(cube, &pair.first, &pair.second, model, u64::MAX).ok()?;
    Some(json!({
        "tests": s.outcomes.len(),
        "sample_ones": s.ones(),
        "sample_compatible_with_first": diagnosis::syndrome_compatible(cube, &pair.first, &s).ok()?,
        "oracle_shared_syndrome": shared,
    }))
}
