//! Job dispatch for the `blowupcalc` command line tool.
//!
//! A job is `{"command": ..., "input": {...}, "options": {...}}`. Running it
//! yields a [`JobResult`] whose JSON form carries the verdict or an error
//! code, together with the options actually used.

use std::io::{BufRead, Write};

use blowupcalc::cremona::{self, CremonaError, ReduceOptions, DEFAULT_MAX_ITERATIONS};
use blowupcalc::lattice::{self, HClass, LatticeError, SymplecticShape};
use blowupcalc::nodal::{self, NodalError};
use blowupcalc::poly::{Polynomial, Var};
use blowupcalc::rational::{self, Q};
use blowupcalc::volume::{self, BundleTower, FiberVolume, VolumeError, DEFAULT_M_MAX};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DEFAULT_D_MAX: u32 = 2;
pub const MAX_ITERATIONS_ENV: &str = "BLOWUPCALC_MAX_ITERATIONS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Reduce,
    Exceptional,
    Volume,
    Trivial,
    Decompose,
    Stability,
    CertifyRank,
    Fibersum,
    SizeCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reduce => "reduce",
            Command::Exceptional => "exceptional",
            Command::Volume => "volume",
            Command::Trivial => "trivial",
            Command::Decompose => "decompose",
            Command::Stability => "stability",
            Command::CertifyRank => "certify-rank",
            Command::Fibersum => "fibersum",
            Command::SizeCheck => "size-check",
        }
    }
}

/// Search bounds; unset fields fall back to the caller's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

impl JobOptions {
    /// Fields set here win over `fallback`.
    pub fn or(self, fallback: JobOptions) -> JobOptions {
        JobOptions {
            d_max: self.d_max.or(fallback.d_max),
            m_max: self.m_max.or(fallback.m_max),
            max_iterations: self.max_iterations.or(fallback.max_iterations),
        }
    }

    pub fn resolve(self) -> Resolved {
        Resolved {
            d_max: self.d_max.unwrap_or(DEFAULT_D_MAX),
            m_max: self.m_max.unwrap_or(DEFAULT_M_MAX),
            max_iterations: self.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolved {
    pub d_max: u32,
    pub m_max: usize,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub input: Value,
    #[serde(default)]
    pub options: JobOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Computed,
    Invalid,
    Degenerate,
    Internal,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Computed => 0,
            Status::Internal => 1,
            Status::Invalid => 2,
            Status::Degenerate => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Resolved>,
}

impl JobResult {
    pub fn exit_code(&self) -> u8 {
        self.status.exit_code()
    }

    pub fn invalid(command: Option<&str>, message: String) -> Self {
        JobResult {
            command: command.map(str::to_string),
            status: Status::Invalid,
            result: None,
            error: Some(JobError {
                code: "invalid_input".into(),
                message,
                details: None,
            }),
            options: None,
        }
    }
}

struct Failure {
    status: Status,
    error: JobError,
}

impl Failure {
    fn new(status: Status, code: &str, message: impl ToString) -> Self {
        Failure {
            status,
            error: JobError {
                code: code.into(),
                message: message.to_string(),
                details: None,
            },
        }
    }

    fn with_details(mut self, details: Value) -> Self {
        self.error.details = Some(details);
        self
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(Status::Invalid, "invalid_input", e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::new(Status::Invalid, "invalid_input", e)
    }
}

impl From<CremonaError> for Failure {
    fn from(e: CremonaError) -> Self {
        match &e {
            CremonaError::DegenerateShape { class, area } => {
                Failure::new(Status::Degenerate, "degenerate_shape", &e)
                    .with_details(json!({ "class": class, "area": area }))
            }
            CremonaError::NonTerminating(_) => Failure::new(Status::Internal, "iteration_cap", e),
            _ => Failure::new(Status::Invalid, "invalid_input", e),
        }
    }
}

impl From<VolumeError> for Failure {
    fn from(e: VolumeError) -> Self {
        match e {
            VolumeError::RankDeficient { .. } => Failure::new(Status::Degenerate, "rank_deficient", e),
            _ => Failure::new(Status::Invalid, "invalid_input", e),
        }
    }
}

impl From<NodalError> for Failure {
    fn from(e: NodalError) -> Self {
        let code = match e {
            NodalError::NotReduced(_) => "not_reduced",
            NodalError::NotExceptional(_) => "not_exceptional",
            NodalError::NotDisjoint => "not_disjoint",
            _ => "invalid_input",
        };
        Failure::new(Status::Invalid, code, e)
    }
}

type Outcome = Result<Value, Failure>;

fn parse<T: serde::de::DeserializeOwned>(input: &Value) -> Result<T, Failure> {
    Ok(T::deserialize(input)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExceptionalInput {
    k: usize,
    #[serde(default)]
    d_max: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleInput {
    n: i64,
    #[serde(default)]
    fiber: FiberVolume,
    lambda: Q,
    ell: i64,
}

#[derive(Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum VolumeMode {
    #[default]
    Tower,
    Multi,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerInput {
    tower: BundleTower,
    #[serde(default)]
    mode: VolumeMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialInput {
    n: i64,
    #[serde(default)]
    fiber: FiberVolume,
    polynomial: Polynomial,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecomposeInput {
    class: HClass,
    #[serde(default)]
    shape: Option<SymplecticShape>,
    #[serde(default)]
    d_bound: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StabilityInput {
    shape: SymplecticShape,
    #[serde(default)]
    exceptional_set: Option<Vec<HClass>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RankInput {
    n: i64,
    r: usize,
    k: usize,
    #[serde(default)]
    chern_basis: Option<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FibersumInput {
    tower: BundleTower,
    #[serde(default)]
    chern_basis: Option<Vec<i64>>,
    #[serde(default)]
    m_max: Option<usize>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SizeInput {
    Nested { eps1: Q, eps2: Q, link: i64 },
    Blowup { alpha: Q, eps: Q, link: i64 },
    Gw { link: i64 },
}

fn run_reduce(input: &Value, opts: &Resolved) -> Outcome {
    let shape: SymplecticShape = parse(input)?;
    let trace = cremona::reduce_with(
        &shape,
        ReduceOptions {
            max_iterations: opts.max_iterations,
        },
    )?;
    Ok(json!({
        "trace": trace,
        "reduced": true,
        "volume": rational::format(&trace.end.volume()),
    }))
}

fn run_exceptional(input: &Value, opts: &Resolved) -> Outcome {
    let inp: ExceptionalInput = parse(input)?;
    let d_max = inp.d_max.unwrap_or(opts.d_max);
    let classes = lattice::enumerate_exceptional(&lattice::make_lattice(inp.k), d_max);
    Ok(json!({ "k": inp.k, "d_max": d_max, "count": classes.len(), "classes": classes }))
}

fn run_volume(input: &Value) -> Outcome {
    let p = if input.get("tower").is_some() {
        let inp: TowerInput = parse(input)?;
        inp.tower.validate()?;
        match inp.mode {
            VolumeMode::Tower => volume::vol_tower(&inp.tower, Var::Mu(0)),
            VolumeMode::Multi => {
                let mu: Vec<Var> = (1..=inp.tower.k as u32).map(Var::Mu).collect();
                volume::vol_multi_blowup(&inp.tower, &mu)?
            }
        }
    } else {
        let inp: SingleInput = parse(input)?;
        volume::vol_single_blowup(inp.n, &inp.fiber, &inp.lambda.0, inp.ell)?
    };
    Ok(json!({ "polynomial": p, "text": p.to_string() }))
}

fn run_trivial(input: &Value) -> Outcome {
    let (p, n, fiber) = if input.get("polynomial").is_some() {
        let inp: PolynomialInput = parse(input)?;
        (inp.polynomial, inp.n, inp.fiber)
    } else {
        let inp: SingleInput = parse(input)?;
        let p = volume::vol_single_blowup(inp.n, &inp.fiber, &inp.lambda.0, inp.ell)?;
        (p, inp.n, inp.fiber)
    };
    let w = volume::triviality_test(&p, n, &fiber)?;
    Ok(json!({ "trivial": w.is_some(), "witness": w, "polynomial": p }))
}

fn run_decompose(input: &Value, opts: &Resolved) -> Outcome {
    let inp: DecomposeInput = parse(input)?;
    let lat = lattice::make_lattice(inp.class.k());
    let d_bound = inp.d_bound.unwrap_or(opts.d_max);
    let found = nodal::decompose_exceptional(&lat, &inp.class, inp.shape.as_ref(), d_bound)?;
    Ok(json!({ "d_bound": d_bound, "count": found.len(), "decompositions": found }))
}

fn run_stability(input: &Value) -> Outcome {
    let inp: StabilityInput = parse(input)?;
    match inp.exceptional_set {
        Some(set) => {
            let lat = lattice::make_lattice(inp.shape.k());
            let stable = nodal::min_class_stability(&lat, &inp.shape, &set)?;
            Ok(json!({ "kind": "min-class", "stable": stable }))
        }
        None => {
            let stable = nodal::cp2_minimal_stability(&inp.shape)?;
            Ok(json!({ "kind": "cp2", "stable": stable }))
        }
    }
}

fn run_certify_rank(input: &Value) -> Outcome {
    let inp: RankInput = parse(input)?;
    let basis = inp.chern_basis.unwrap_or_else(|| vec![0; inp.r]);
    let c = volume::rank_certificate(inp.n, inp.r, inp.k, &basis)?;
    Ok(json!({ "certified": true, "bound": c.bound(), "certificate": c }))
}

fn run_fibersum(input: &Value, opts: &Resolved) -> Outcome {
    let inp: FibersumInput = parse(input)?;
    let basis = inp.chern_basis.unwrap_or_else(|| vec![0; inp.tower.r]);
    let m_max = inp.m_max.unwrap_or(opts.m_max);
    let w = volume::fibersum_feasibility(&inp.tower, m_max, &basis)?;
    Ok(json!({
        "feasible": w.is_some(),
        "m_max": m_max,
        "chern_consistent": volume::chern_consistency(&inp.tower, &basis)?,
        "witness": w,
    }))
}

fn run_size_check(input: &Value) -> Outcome {
    match parse::<SizeInput>(input)? {
        SizeInput::Nested { eps1, eps2, link } => {
            let ok = nodal::nested_size_check(&eps1.0, &eps2.0, link)?;
            Ok(json!({ "kind": "nested", "consistent": ok }))
        }
        SizeInput::Blowup { alpha, eps, link } => {
            let ok = nodal::blowup_size_bound(&alpha.0, &eps.0, link)?;
            Ok(json!({ "kind": "blowup", "consistent": ok }))
        }
        SizeInput::Gw { link } => Ok(json!({
            "kind": "gw",
            "gw": nodal::gw_blowdown_pair(link),
            "exceptional_self_pairing": nodal::E_SELF_PAIRING_GW,
        })),
    }
}

/// Runs one job. `defaults` fills options the job leaves unset.
pub fn run_job(job: &JobSpec, defaults: JobOptions) -> JobResult {
    let opts = job.options.or(defaults).resolve();
    let outcome = match job.command {
        Command::Reduce => run_reduce(&job.input, &opts),
        Command::Exceptional => run_exceptional(&job.input, &opts),
        Command::Volume => run_volume(&job.input),
        Command::Trivial => run_trivial(&job.input),
        Command::Decompose => run_decompose(&job.input, &opts),
        Command::Stability => run_stability(&job.input),
        Command::CertifyRank => run_certify_rank(&job.input),
        Command::Fibersum => run_fibersum(&job.input, &opts),
        Command::SizeCheck => run_size_check(&job.input),
    };
    let (status, result, error) = match outcome {
        Ok(v) => (Status::Computed, Some(v), None),
        Err(f) => (f.status, None, Some(f.error)),
    };
    JobResult {
        command: Some(job.command.name().to_string()),
        status,
        result,
        error,
        options: Some(opts),
    }
}

/// Parses and runs one corpus line.
pub fn run_line(line: &str, defaults: JobOptions) -> JobResult {
    let raw: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return JobResult::invalid(None, format!("malformed JSON: {e}")),
    };
    let command = raw.get("command").and_then(Value::as_str).map(str::to_string);
    match JobSpec::deserialize(&raw) {
        Ok(job) => run_job(&job, defaults),
        Err(e) => JobResult::invalid(command.as_deref(), e.to_string()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub jobs: usize,
    pub computed: usize,
    pub invalid: usize,
    pub degenerate: usize,
    pub internal: usize,
}

impl Summary {
    fn record(&mut self, s: Status) {
        self.jobs += 1;
        match s {
            Status::Computed => self.computed += 1,
            Status::Invalid => self.invalid += 1,
            Status::Degenerate => self.degenerate += 1,
            Status::Internal => self.internal += 1,
        }
    }
}

#[derive(Serialize)]
struct CorpusLine<'a> {
    line: usize,
    #[serde(flatten)]
    result: &'a JobResult,
}

/// Runs every non-blank line of `input` and writes one JSON result per job,
/// in input order, followed by `{"summary": ...}`.
pub fn run_corpus<R: BufRead, W: Write>(
    input: R,
    out: &mut W,
    defaults: JobOptions,
) -> std::io::Result<Summary> {
    let mut summary = Summary::default();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let result = run_line(&line, defaults);
        summary.record(result.status);
        let rec = CorpusLine {
            line: idx + 1,
            result: &result,
        };
        writeln!(out, "{}", serde_json::to_string(&rec).expect("results serialize"))?;
    }
    writeln!(out, "{}", json!({ "summary": summary }))?;
    Ok(summary)
}

fn random_q(rng: &mut ChaCha8Rng, max_num: i64) -> String {
    rational::format(&rational::ratio(rng.random_range(1..=max_num), rng.random_range(1..=10)))
}

/// A reproducible corpus of `count` jobs for exercising the runner.
pub fn generate_corpus(seed: u64, count: usize) -> Vec<JobSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (command, input) = match rng.random_range(0..5) {
                0 => {
                    let k = rng.random_range(0..=9);
                    let eps: Vec<String> = (0..k).map(|_| random_q(&mut rng, 100)).collect();
                    (Command::Reduce, json!({ "mu": random_q(&mut rng, 100), "eps": eps }))
                }
                1 => (
                    Command::Trivial,
                    json!({
                        "n": rng.random_range(1..=4),
                        "lambda": rational::format(&rational::ratio(rng.random_range(-6..=6), rng.random_range(1..=3))),
                        "ell": rng.random_range(-3..=3),
                    }),
                ),
                2 => (
                    Command::Exceptional,
                    json!({ "k": rng.random_range(0..=6), "d_max": rng.random_range(0..=2) }),
                ),
                3 => {
                    let k = rng.random_range(2..=4);
                    let ell = rng.random_range(-2..=2);
                    (
                        Command::Fibersum,
                        json!({ "tower": BundleTower::graph_of_e1(2, 0, k, ell) }),
                    )
                }
                _ => (
                    Command::SizeCheck,
                    json!({
                        "kind": "blowup",
                        "alpha": random_q(&mut rng, 20),
                        "eps": random_q(&mut rng, 20),
                        "link": rng.random_range(-1..=1),
                    }),
                ),
            };
            JobSpec {
                command,
                input,
                options: JobOptions::default(),
            }
        })
        .collect()
}
