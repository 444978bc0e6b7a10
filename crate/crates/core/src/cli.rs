//! Command-line front end.
//!
//! Exit status: 0 when the checked relation holds or the command is
//! informational, 1 on runtime errors, 2 on usage errors, 3 when violations
//! were found.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::entropy::EntropySpec;
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, ModePartition};
use crate::io::{cell, emit_report, read_state_file, AnyState, CsvRows, DiscreteState, Format, Report};
use crate::relations::{
    campaign, ghz_monogamy_demo, majorization_gap, one_to_rest, polygon_check, purified_equivalence_demo,
    qubit_marginal_check, gaussian_marginal_check, smallest_qubit_eigenvalues, subadditivity_check, table1,
    theorem2_proof_trace, wstate_violation, Bipartition, CampaignConfig, MarginalSpectra, PartyState, PolygonReport,
    Relation, Sampler, SystemSpec, DEFAULT_WSTATE_GRID,
};
use crate::tolerance::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Master seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;
/// Samples per campaign when `--samples` is not given.
pub const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_SPECS: [&str; 3] = ["S", "R:p=2", "T:q=2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn check_spec(s: &str) -> std::result::Result<String, String> {
    EntropySpec::parse_with_base(s, EntropySpec::DEFAULT_BASE)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn check_system(s: &str) -> std::result::Result<SystemSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn check_relation(s: &str) -> std::result::Result<Relation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "entropic-polygon", version, about = "Entropic polygon relations and subadditivity checks")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,

    /// Entropy spec: S, R:p=<p>, T:q=<q>, optionally :b=<base>. Repeatable.
    #[arg(long = "spec", global = true, value_parser = check_spec)]
    specs: Vec<String>,
    /// System descriptor: qubits:N, qudits:d1,d2,…, gaussian:m1,m2,…[:z=..][:smax=..]
    #[arg(long, global = true, value_parser = check_system)]
    system: Option<SystemSpec>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.violation)]
    tol: f64,
    /// Logarithm base for specs without an explicit :b=.
    #[arg(long, global = true, default_value_t = EntropySpec::DEFAULT_BASE)]
    base: f64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct StateArgs {
    /// State file in the JSON exchange format (discrete or covariance matrix).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Modes per party for covariance-matrix inputs (default: one mode each).
    #[arg(long, value_delimiter = ',')]
    partition: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Subcommand)]
enum CommandArgs {
    /// Entropies of a state or one of its marginals.
    Entropy {
        #[command(flatten)]
        state: StateArgs,
        /// Parties of the marginal (default: all).
        #[arg(long, value_delimiter = ',')]
        keep: Option<Vec<usize>>,
    },
    /// Polygon relation of a pure state, or a polygon campaign.
    Polygon {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Subadditivity of a bipartite state, or a subadditivity campaign.
    Subadd {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Marginal-spectrum inequalities of a pure state, or a campaign.
    Marginal {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Weak majorization of --x by --y, of a covariance matrix, or a campaign.
    Majorize {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
    },
    /// Rényi polygon counterexample search over W-class states.
    Wstate {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Subadditivity versus the polygon relation of the purification.
    Equiv {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Links of the Gaussian polygon proof for a pure covariance matrix, or a campaign.
    Theorem2 {
        #[command(flatten)]
        state: StateArgs,
        /// Party on the left of the polygon inequality (default: last).
        #[arg(long)]
        excluded: Option<usize>,
    },
    /// Entropies of the three-qubit GHZ state and its marginals.
    GhzDemo,
    /// Seeded campaign of any relation.
    Campaign {
        #[arg(long, value_parser = check_relation, default_value = "polygon")]
        relation: Relation,
        /// Use W-class states with these a₁² values instead of random states.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Property-by-system matrix for subadditivity and the polygon relation.
    Table1,
}

/// Parsed and validated command line.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub command: Command,
    pub specs: Vec<EntropySpec>,
    pub system: Option<SystemSpec>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub tol: f64,
    pub base: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Entropy { state: PathBuf, partition: Option<Vec<usize>>, keep: Option<Vec<usize>> },
    Polygon { state: Option<PathBuf>, partition: Option<Vec<usize>> },
    Subadd { state: Option<PathBuf>, partition: Option<Vec<usize>> },
    Marginal { state: Option<PathBuf>, partition: Option<Vec<usize>> },
    Majorize { state: Option<PathBuf>, partition: Option<Vec<usize>>, x: Option<Vec<f64>>, y: Option<Vec<f64>> },
    Wstate { p: f64, n: usize, grid: Vec<f64> },
    Equiv { state: Option<PathBuf>, partition: Option<Vec<usize>> },
    Theorem2 { state: Option<PathBuf>, partition: Option<Vec<usize>>, excluded: Option<usize> },
    GhzDemo,
    Campaign { relation: Relation, grid: Option<Vec<f64>> },
    Table1,
}

fn usage_error(msg: impl std::fmt::Display) -> clap::Error {
    clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{msg}\n"))
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if !(cli.base.is_finite() && cli.base > 1.0) {
        return Err(usage_error(format!("--base must be > 1, got {}", cli.base)));
    }
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(usage_error(format!("--tol must be ≥ 0, got {}", cli.tol)));
    }
    if cli.samples == Some(0) {
        return Err(usage_error("--samples must be ≥ 1"));
    }
    let raw: Vec<String> = if cli.specs.is_empty() {
        DEFAULT_SPECS.iter().map(|s| s.to_string()).collect()
    } else {
        cli.specs.clone()
    };
    let specs = raw
        .iter()
        .map(|s| EntropySpec::parse_with_base(s, cli.base))
        .collect::<Result<Vec<_>>>()
        .map_err(usage_error)?;
    let command = match cli.command {
        CommandArgs::Entropy { state, keep } => Command::Entropy {
            state: state.state.ok_or_else(|| usage_error("entropy needs --state"))?,
            partition: state.partition,
            keep,
        },
        CommandArgs::Polygon { state } => Command::Polygon { state: state.state, partition: state.partition },
        CommandArgs::Subadd { state } => Command::Subadd { state: state.state, partition: state.partition },
        CommandArgs::Marginal { state } => Command::Marginal { state: state.state, partition: state.partition },
        CommandArgs::Majorize { state, x, y } => {
            if x.is_some() != y.is_some() {
                return Err(usage_error("--x and --y must be given together"));
            }
            Command::Majorize { state: state.state, partition: state.partition, x, y }
        }
        CommandArgs::Wstate { p, n, grid } => Command::Wstate {
            p,
            n,
            grid: grid.unwrap_or_else(|| DEFAULT_WSTATE_GRID.to_vec()),
        },
        CommandArgs::Equiv { state } => Command::Equiv { state: state.state, partition: state.partition },
        CommandArgs::Theorem2 { state, excluded } => Command::Theorem2 {
            state: state.state,
            partition: state.partition,
            excluded,
        },
        CommandArgs::GhzDemo => Command::GhzDemo,
        CommandArgs::Campaign { relation, grid } => Command::Campaign { relation, grid },
        CommandArgs::Table1 => Command::Table1,
    };
    Ok(CliConfig {
        command,
        specs,
        system: cli.system,
        samples: cli.samples,
        seed: cli.seed,
        tol: cli.tol,
        base: cli.base,
        out: cli.out,
        format: match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
        workers: cli.workers,
    })
}

/// Results computed per entropy spec.
#[derive(Debug, Clone, Serialize)]
struct PerSpec<T> {
    entries: Vec<SpecEntry<T>>,
}

#[derive(Debug, Clone, Serialize)]
struct SpecEntry<T> {
    spec: EntropySpec,
    result: T,
}

impl<T: CsvRows> CsvRows for PerSpec<T> {
    fn csv_header(&self) -> Vec<&'static str> {
        let mut h = vec!["spec"];
        if let Some(e) = self.entries.first() {
            h.extend(e.result.csv_header());
        }
        h
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.result.csv_rows().into_iter().map(move |r| {
                    let mut row = vec![e.spec.to_string()];
                    row.extend(r);
                    row
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
struct EntropyValue {
    value: f64,
}

impl CsvRows for EntropyValue {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["value"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![cell(self.value)]]
    }
}

#[derive(Debug, Clone, Serialize)]
struct MarginalReport {
    kind: &'static str,
    /// Smallest qubit eigenvalues, or single-mode symplectic eigenvalues.
    inputs: Vec<f64>,
    report: PolygonReport,
}

impl CsvRows for MarginalReport {
    fn csv_header(&self) -> Vec<&'static str> {
        self.report.csv_header()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.report.csv_rows()
    }
}

#[derive(Debug, Clone, Serialize)]
struct MajorizeReport {
    x: Vec<f64>,
    y: Vec<f64>,
    gap: f64,
    majorized: bool,
}

impl CsvRows for MajorizeReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["gap", "majorized"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![cell(self.gap), self.majorized.to_string()]]
    }
}

enum Loaded {
    Discrete(DiscreteState),
    Gaussian(CovarianceMatrix, ModePartition),
}

impl Loaded {
    fn party_state(&self) -> PartyState<'_> {
        match self {
            Loaded::Discrete(DiscreteState::Vector(v)) => PartyState::Vector(v),
            Loaded::Discrete(DiscreteState::Density(d)) => PartyState::Density(d),
            Loaded::Gaussian(cm, p) => PartyState::Gaussian(cm, p),
        }
    }
}

fn load(path: &Path, partition: &Option<Vec<usize>>) -> Result<Loaded> {
    match read_state_file(path)? {
        AnyState::Discrete(d) => {
            if partition.is_some() {
                return Err(Error::Config("--partition applies to covariance-matrix states".into()));
            }
            Ok(Loaded::Discrete(d))
        }
        AnyState::Gaussian(cm) => {
            let p = match partition {
                Some(sizes) => ModePartition::new(sizes.clone())?,
                None => ModePartition::singletons(cm.n_modes())?,
            };
            p.check_matches(&cm)?;
            Ok(Loaded::Gaussian(cm, p))
        }
    }
}

fn emit<R: Report>(cfg: &CliConfig, report: &R) -> Result<()> {
    emit_report(report, cfg.format, cfg.out.as_deref())
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn run_campaign(cfg: &CliConfig, relation: Relation, default_system: &str, sampler: Sampler) -> Result<i32> {
    let system = match &cfg.system {
        Some(s) => s.clone(),
        None => default_system.parse()?,
    };
    let mut c = CampaignConfig::new(system, relation, cfg.specs.clone(), cfg.samples.unwrap_or(DEFAULT_SAMPLES), cfg.seed);
    c.tolerance = cfg.tol;
    c.sampler = sampler;
    c.workers = cfg.workers;
    let report = campaign(&c)?;
    emit(cfg, &report)?;
    Ok(verdict(report.total_violations() == 0))
}

fn per_spec<T>(cfg: &CliConfig, f: impl Fn(&EntropySpec) -> Result<T>) -> Result<PerSpec<T>> {
    Ok(PerSpec {
        entries: cfg
            .specs
            .iter()
            .map(|e| Ok(SpecEntry { spec: *e, result: f(e)? }))
            .collect::<Result<_>>()?,
    })
}

/// Executes the command and returns the process exit status.
pub fn run(cfg: &CliConfig) -> Result<i32> {
    match &cfg.command {
        Command::Entropy { state, partition, keep } => {
            let loaded = load(state, partition)?;
            let st = loaded.party_state();
            let all: Vec<usize> = (0..st.n_parties()).collect();
            let parties = keep.clone().unwrap_or(all);
            let spectra = st.marginal_spectrum(&parties)?;
            let report = per_spec(cfg, |e| Ok(EntropyValue { value: spectra.entropies(e)[0] }))?;
            emit(cfg, &report)?;
            Ok(EXIT_OK)
        }
        Command::Polygon { state: Some(path), partition } => {
            let loaded = load(path, partition)?;
            let report = per_spec(cfg, |e| polygon_check(&one_to_rest(loaded.party_state(), e)?, cfg.tol))?;
            emit(cfg, &report)?;
            Ok(verdict(report.entries.iter().all(|x| x.result.holds)))
        }
        Command::Polygon { state: None, .. } => run_campaign(cfg, Relation::Polygon, "qubits:3", Sampler::Random),
        Command::Subadd { state: Some(path), partition } => {
            let loaded = load(path, partition)?;
            let report = per_spec(cfg, |e| subadditivity_check(loaded.party_state(), &Bipartition::pair(), e, cfg.tol))?;
            emit(cfg, &report)?;
            Ok(verdict(report.entries.iter().all(|x| x.result.holds)))
        }
        Command::Subadd { state: None, .. } => run_campaign(cfg, Relation::Subadditivity, "gaussian:1,1", Sampler::Random),
        Command::Marginal { state: Some(path), partition } => {
            let report = match load(path, partition)? {
                Loaded::Discrete(DiscreteState::Vector(v)) => {
                    let l = smallest_qubit_eigenvalues(&v)?;
                    let report = qubit_marginal_check(&l, cfg.tol)?;
                    MarginalReport { kind: "qubit", inputs: l, report }
                }
                Loaded::Discrete(DiscreteState::Density(_)) => {
                    return Err(Error::Config("marginal check needs a pure state vector".into()));
                }
                Loaded::Gaussian(cm, p) => {
                    if p.sizes().iter().any(|&m| m != 1) {
                        return Err(Error::Config("marginal check needs single-mode parties".into()));
                    }
                    let st = PartyState::Gaussian(&cm, &p);
                    if !st.is_pure(Tolerances::DEFAULT.purity)? {
                        return Err(Error::NotPure(f64::NAN));
                    }
                    let s = crate::gaussian::single_mode_eigenvalues(&cm);
                    let report = gaussian_marginal_check(&s, cfg.tol)?;
                    MarginalReport { kind: "gaussian", inputs: s, report }
                }
            };
            emit(cfg, &report)?;
            Ok(verdict(report.report.holds))
        }
        Command::Marginal { state: None, .. } => run_campaign(cfg, Relation::Marginal, "qubits:4", Sampler::Random),
        Command::Majorize { x: Some(x), y: Some(y), .. } => {
            let gap = majorization_gap(x, y)?;
            let report = MajorizeReport { x: x.clone(), y: y.clone(), gap, majorized: gap >= 0.0 };
            emit(cfg, &report)?;
            Ok(verdict(report.majorized))
        }
        Command::Majorize { state: Some(path), partition, .. } => {
            let Loaded::Gaussian(cm, p) = load(path, partition)? else {
                return Err(Error::Config("majorize --state needs a covariance matrix".into()));
            };
            let d = match PartyState::Gaussian(&cm, &p).single_party_spectra()? {
                MarginalSpectra::Gaussian(s) => s.iter().flat_map(|x| x.values().to_vec()).collect::<Vec<f64>>(),
                MarginalSpectra::Discrete(_) => unreachable!("Gaussian input"),
            };
            let s = crate::gaussian::symplectic_spectrum(&cm)?.values().to_vec();
            let gap = majorization_gap(&d, &s)?;
            let report = MajorizeReport { x: d, y: s, gap, majorized: gap >= -cfg.tol };
            emit(cfg, &report)?;
            Ok(verdict(report.majorized))
        }
        Command::Majorize { .. } => run_campaign(cfg, Relation::Majorization, "gaussian:1,1,1", Sampler::Random),
        Command::Wstate { p, n, grid } => {
            let findings = wstate_violation(*p, *n, grid, cfg.base)?;
            emit(cfg, &findings)?;
            Ok(verdict(findings.witness.is_none()))
        }
        Command::Equiv { state: Some(path), partition } => {
            let loaded = load(path, partition)?;
            let report = per_spec(cfg, |e| purified_equivalence_demo(loaded.party_state(), e, cfg.tol))?;
            emit(cfg, &report)?;
            Ok(verdict(report.entries.iter().all(|x| x.result.consistent)))
        }
        Command::Equiv { state: None, .. } => run_campaign(cfg, Relation::Equivalence, "qudits:2,2", Sampler::Random),
        Command::Theorem2 { state: Some(path), partition, excluded } => {
            let Loaded::Gaussian(cm, p) = load(path, partition)? else {
                return Err(Error::Config("theorem2 needs a covariance matrix".into()));
            };
            let tol = Tolerances::DEFAULT.bona_fide;
            let report = per_spec(cfg, |e| theorem2_proof_trace(&cm, &p, e, *excluded, tol))?;
            emit(cfg, &report)?;
            Ok(verdict(report.entries.iter().all(|x| x.result.all_hold)))
        }
        Command::Theorem2 { state: None, .. } => run_campaign(cfg, Relation::Theorem2, "gaussian:1,1,1", Sampler::Random),
        Command::GhzDemo => {
            let report = per_spec(cfg, ghz_monogamy_demo)?;
            emit(cfg, &report)?;
            Ok(EXIT_OK)
        }
        Command::Campaign { relation, grid } => {
            let sampler = match grid {
                Some(g) => Sampler::WClassGrid(g.clone()),
                None => Sampler::Random,
            };
            run_campaign(cfg, *relation, "qubits:3", sampler)
        }
        Command::Table1 => {
            let report = table1(cfg.samples.unwrap_or(DEFAULT_SAMPLES), cfg.seed, cfg.workers)?;
            eprint!("{}", report.render_matrix());
            emit(cfg, &report)?;
            Ok(verdict(report.all_match))
        }
    }
}

/// Parses `argv`, runs the command and maps every outcome to an exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> std::result::Result<CliConfig, clap::Error> {
        parse_args(std::iter::once("entropic-polygon").chain(args.split_whitespace()))
    }

    #[test]
    fn parses_examples() {
        let c = parse("entropy --spec R:p=2 --state bell.json").unwrap();
        assert_eq!(c.specs, vec![EntropySpec::renyi(2.0).unwrap()]);
        assert!(matches!(c.command, Command::Entropy { .. }));

        let c = parse("campaign --system qubits:3 --relation polygon --samples 10000 --seed 7").unwrap();
        assert_eq!(c.samples, Some(10000));
        assert_eq!(c.seed, 7);
        assert_eq!(c.system, Some(SystemSpec::Qubits(3)));
        assert_eq!(c.command, Command::Campaign { relation: Relation::Polygon, grid: None });

        let c = parse("polygon").unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.specs.len(), 3);
    }

    #[test]
    fn usage_errors() {
        for bad in [
            "entropy --spec R:p=0.5 --state x.json",
            "polygon --bogus",
            "entropy",
            "polygon --base 1",
            "campaign --relation nope",
            "polygon --system qubits:1",
            "majorize --x 1,2",
            "subadd --samples 0",
        ] {
            let e = parse(bad).unwrap_err();
            assert!(e.use_stderr(), "{bad}");
        }
    }

    #[test]
    fn base_applies_to_specs_without_explicit_base() {
        let c = parse("polygon --base 3 --spec S --spec R:p=2:b=2 --spec T:q=2").unwrap();
        assert_eq!(c.specs[0].log_base(), 3.0);
        assert_eq!(c.specs[1].log_base(), 2.0);
    }
}
