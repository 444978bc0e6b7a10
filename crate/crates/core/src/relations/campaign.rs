//! Seeded Monte Carlo campaigns over random states.
//!
//! Sample `i` draws from `ChaCha8Rng` seeded with the master seed on stream `i`,
//! so every sample is reproducible on its own and the report does not depend
//! on the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::demos::{equivalence_from_spectra, equivalence_spectra, theorem2_proof_trace};
use super::{bipartite_spectra, majorization_gap, polygon_slacks, Bipartition, MarginalSpectra, PartyState};
use crate::discrete::{haar_random_pure, named_state, random_density, DimsLayout, NamedState, StateVector};
use crate::entropy::EntropySpec;
use crate::error::{Error, Result};
use crate::gaussian::{
    random_symplectic, single_mode_eigenvalues, symplectic_spectrum, CmKind, CovarianceMatrix, ModePartition,
    DEFAULT_Z_MAX,
};
use crate::io::{cell, encode_cm, encode_vector, encode_density, CsvRows};

pub const DEFAULT_MAX_WITNESSES: usize = 8;
const DEFAULT_S_MAX: f64 = 4.0;

/// Which family of random states a campaign samples.
///
/// String form: `qubits:3`, `qudits:2,3`, `gaussian:1,1`, `gaussian:2,1,1:z=2:smax=4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SystemSpec {
    Qubits(usize),
    Qudits(Vec<usize>),
    Gaussian {
        partition: ModePartition,
        z_max: f64,
        s_max: f64,
    },
}

impl SystemSpec {
    pub fn n_parties(&self) -> usize {
        match self {
            SystemSpec::Qubits(n) => *n,
            SystemSpec::Qudits(d) => d.len(),
            SystemSpec::Gaussian { partition, .. } => partition.n_parties(),
        }
    }

    fn layout(&self) -> Result<DimsLayout> {
        match self {
            SystemSpec::Qubits(n) => DimsLayout::qubits(*n),
            SystemSpec::Qudits(d) => DimsLayout::new(d.clone()),
            SystemSpec::Gaussian { .. } => Err(Error::Config("Gaussian system has no discrete layout".into())),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad integer '{x}'"))))
        .collect()
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let body = parts
            .next()
            .ok_or_else(|| Error::Config(format!("system '{s}' needs a ':'-separated size")))?;
        let spec = match kind {
            "qubits" => {
                let n = body.parse::<usize>().map_err(|_| Error::Config(format!("bad qubit count '{body}'")))?;
                DimsLayout::qubits(n)?;
                SystemSpec::Qubits(n)
            }
            "qudits" => {
                let dims = parse_list(body)?;
                DimsLayout::new(dims.clone())?;
                SystemSpec::Qudits(dims)
            }
            "gaussian" => {
                let partition = ModePartition::new(parse_list(body)?)?;
                let (mut z_max, mut s_max) = (DEFAULT_Z_MAX, DEFAULT_S_MAX);
                for opt in parts.by_ref() {
                    let (k, v) = opt
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("bad option '{opt}' in '{s}'")))?;
                    let v: f64 = v.parse().map_err(|_| Error::Config(format!("bad number '{v}'")))?;
                    match k {
                        "z" => z_max = v,
                        "smax" => s_max = v,
                        _ => return Err(Error::Config(format!("unknown option '{k}' in '{s}'"))),
                    }
                }
                if !(z_max.is_finite() && z_max > 0.0) {
                    return Err(Error::Config(format!("z must be > 0, got {z_max}")));
                }
                if !(s_max.is_finite() && s_max >= 1.0) {
                    return Err(Error::Config(format!("smax must be ≥ 1, got {s_max}")));
                }
                if partition.n_parties() < 2 {
                    return Err(Error::Config(format!("system '{s}' needs at least 2 parties")));
                }
                return Ok(SystemSpec::Gaussian { partition, z_max, s_max });
            }
            _ => return Err(Error::Config(format!("unknown system kind '{kind}'"))),
        };
        if spec.n_parties() < 2 {
            return Err(Error::Config(format!("system '{s}' needs at least 2 parties")));
        }
        match parts.next() {
            Some(extra) => Err(Error::Config(format!("unexpected '{extra}' in '{s}'"))),
            None => Ok(spec),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            SystemSpec::Qubits(n) => write!(f, "qubits:{n}"),
            SystemSpec::Qudits(d) => write!(f, "qudits:{}", join(d)),
            SystemSpec::Gaussian { partition, z_max, s_max } => {
                write!(f, "gaussian:{}:z={z_max}:smax={s_max}", join(partition.sizes()))
            }
        }
    }
}

impl TryFrom<String> for SystemSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SystemSpec> for String {
    fn from(s: SystemSpec) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Polygon,
    Subadditivity,
    Marginal,
    Majorization,
    Theorem2,
    Equivalence,
}

impl Relation {
    pub fn uses_specs(self) -> bool {
        !matches!(self, Relation::Marginal | Relation::Majorization)
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Polygon => "polygon",
            Relation::Subadditivity => "subadditivity",
            Relation::Marginal => "marginal",
            Relation::Majorization => "majorization",
            Relation::Theorem2 => "theorem2",
            Relation::Equivalence => "equivalence",
        }
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "polygon" => Relation::Polygon,
            "subadditivity" | "subadd" => Relation::Subadditivity,
            "marginal" => Relation::Marginal,
            "majorization" | "majorize" => Relation::Majorization,
            "theorem2" => Relation::Theorem2,
            "equivalence" | "equiv" => Relation::Equivalence,
            _ => return Err(Error::Config(format!("unknown relation '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// States drawn from the system's random ensemble.
    Random,
    /// W-class states cycling through the `a₁²` grid (qubit polygon only).
    WClassGrid(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub system: SystemSpec,
    pub relation: Relation,
    pub specs: Vec<EntropySpec>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub sampler: Sampler,
    pub max_witnesses: usize,
    /// Worker threads; `None` uses the global pool. Does not affect results.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl CampaignConfig {
    pub fn new(system: SystemSpec, relation: Relation, specs: Vec<EntropySpec>, samples: usize, seed: u64) -> Self {
        Self {
            system,
            relation,
            specs,
            samples,
            seed,
            tolerance: crate::tolerance::Tolerances::DEFAULT.violation,
            sampler: Sampler::Random,
            max_witnesses: DEFAULT_MAX_WITNESSES,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("sample count must be ≥ 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::Config(format!("tolerance must be ≥ 0, got {}", self.tolerance)));
        }
        if self.relation.uses_specs() && self.specs.is_empty() {
            return Err(Error::Config(format!("relation '{}' needs at least one entropy spec", self.relation.name())));
        }
        let gaussian = matches!(self.system, SystemSpec::Gaussian { .. });
        let n = self.system.n_parties();
        match self.relation {
            Relation::Polygon | Relation::Theorem2 if n < 2 => {
                return Err(Error::Config("polygon relations need ≥ 2 parties".into()));
            }
            Relation::Subadditivity | Relation::Equivalence if n != 2 => {
                return Err(Error::Config(format!("{} needs exactly 2 parties, got {n}", self.relation.name())));
            }
            Relation::Theorem2 | Relation::Majorization if !gaussian => {
                return Err(Error::Config(format!("{} needs a Gaussian system", self.relation.name())));
            }
            Relation::Marginal => match &self.system {
                SystemSpec::Qubits(n) if *n >= 2 => {}
                SystemSpec::Gaussian { partition, .. } if partition.sizes().iter().all(|&s| s == 1) && n >= 2 => {}
                _ => {
                    return Err(Error::Config(
                        "marginal relation needs ≥ 2 qubits or ≥ 2 single-mode Gaussian parties".into(),
                    ))
                }
            },
            _ => {}
        }
        if let Sampler::WClassGrid(grid) = &self.sampler {
            if !matches!(self.system, SystemSpec::Qubits(n) if n >= 2) || self.relation != Relation::Polygon {
                return Err(Error::Config("the W-class sampler applies to qubit polygon campaigns".into()));
            }
            if grid.is_empty() || grid.iter().any(|a| !(a.is_finite() && *a > 0.0 && *a < 1.0)) {
                return Err(Error::Config("W-class grid values must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    fn keys(&self) -> Vec<String> {
        if self.relation.uses_specs() {
            self.specs.iter().map(|s| s.to_string()).collect()
        } else {
            vec![self.relation.name().to_string()]
        }
    }
}

/// A violating sample, replayable from `(seed, sample_index)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub seed: u64,
    pub sample_index: usize,
    pub slack: f64,
    pub state: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecOutcome {
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: Option<f64>,
    pub worst_index: Option<usize>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub per_spec: BTreeMap<String, SpecOutcome>,
}

impl CampaignReport {
    pub fn total_violations(&self) -> usize {
        self.per_spec.values().map(|o| o.violations).sum()
    }
}

impl CsvRows for CampaignReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["spec", "checked", "violations", "worst_slack"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.per_spec
            .iter()
            .map(|(k, o)| {
                vec![
                    k.clone(),
                    o.checked.to_string(),
                    o.violations.to_string(),
                    o.worst_slack.map(cell).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Per-sample slack for every key, with the state kept only when needed.
struct SampleOutcome {
    slacks: Vec<f64>,
    state: Option<serde_json::Value>,
}

enum Drawn {
    Vector(StateVector),
    Density(crate::discrete::DensityMatrix),
    Gaussian(CovarianceMatrix),
}

impl Drawn {
    fn encode(&self) -> serde_json::Value {
        let v = match self {
            Drawn::Vector(v) => serde_json::to_value(encode_vector(v)),
            Drawn::Density(d) => serde_json::to_value(encode_density(d)),
            Drawn::Gaussian(c) => serde_json::to_value(encode_cm(c)),
        };
        v.expect("exchange formats serialize")
    }
}

fn draw(config: &CampaignConfig, index: usize, rng: &mut ChaCha8Rng) -> Result<Drawn> {
    let pure = matches!(config.relation, Relation::Polygon | Relation::Theorem2 | Relation::Marginal);
    match (&config.system, &config.sampler) {
        (SystemSpec::Qubits(n), Sampler::WClassGrid(grid)) => {
            let a1 = grid[index % grid.len()];
            let rest = ((1.0 - a1) / (*n - 1) as f64).sqrt();
            let mut amps = vec![a1.sqrt()];
            amps.extend(std::iter::repeat_n(rest, n - 1));
            Ok(Drawn::Vector(named_state(&NamedState::WClass(amps))?))
        }
        (SystemSpec::Gaussian { partition, z_max, s_max }, _) => {
            let n = partition.n_modes();
            if pure {
                let s = random_symplectic(n, *z_max, rng)?;
                Ok(Drawn::Gaussian(CovarianceMatrix::vacuum(n).transform(&s)?))
            } else {
                let (sigma, _) = crate::gaussian::random_cm_planted(n, CmKind::Mixed { s_max: *s_max }, *z_max, rng)?;
                Ok(Drawn::Gaussian(sigma))
            }
        }
        (system, _) => {
            let layout = system.layout()?;
            if pure {
                Ok(Drawn::Vector(haar_random_pure(&layout, rng)))
            } else {
                let dim = layout.total_dim();
                let rank = rng.random_range(1..=dim);
                Ok(Drawn::Density(random_density(dim, rank, rng)?.with_layout(layout)?))
            }
        }
    }
}

fn party_state<'a>(drawn: &'a Drawn, partition: Option<&'a ModePartition>) -> PartyState<'a> {
    match drawn {
        Drawn::Vector(v) => PartyState::Vector(v),
        Drawn::Density(d) => PartyState::Density(d),
        Drawn::Gaussian(c) => PartyState::Gaussian(c, partition.expect("Gaussian system carries a partition")),
    }
}

fn evaluate(config: &CampaignConfig, index: usize) -> Result<SampleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let drawn = draw(config, index, &mut rng)?;
    let partition = match &config.system {
        SystemSpec::Gaussian { partition, .. } => Some(partition),
        _ => None,
    };
    let state = party_state(&drawn, partition);
    let tol = config.tolerance;
    let slacks: Vec<f64> = match config.relation {
        Relation::Polygon => {
            let spectra = state.single_party_spectra()?;
            config
                .specs
                .iter()
                .map(|e| polygon_slacks(&spectra.entropies(e), tol).map(|r| r.min_slack))
                .collect::<Result<_>>()?
        }
        Relation::Subadditivity => {
            let spectra = bipartite_spectra(state, &Bipartition::pair())?;
            config
                .specs
                .iter()
                .map(|e| {
                    let v = spectra.entropies(e);
                    v[1] + v[2] - v[0]
                })
                .collect()
        }
        Relation::Equivalence => {
            let (bip, purified) = equivalence_spectra(state)?;
            config
                .specs
                .iter()
                .map(|e| equivalence_from_spectra(&bip, &purified, e, tol).map(|r| -r.discrepancy))
                .collect::<Result<_>>()?
        }
        Relation::Theorem2 => {
            let (Drawn::Gaussian(cm), Some(p)) = (&drawn, partition) else {
                unreachable!("validated Gaussian system")
            };
            config
                .specs
                .iter()
                .map(|e| theorem2_proof_trace(cm, p, e, None, tol).map(|t| t.min_gap))
                .collect::<Result<_>>()?
        }
        Relation::Marginal => {
            let values = match (&drawn, state.single_party_spectra()?) {
                (Drawn::Gaussian(cm), _) => single_mode_eigenvalues(cm).iter().map(|s| s - 1.0).collect(),
                (_, MarginalSpectra::Discrete(s)) => s.iter().map(|x| x.min()).collect::<Vec<f64>>(),
                _ => unreachable!("validated system"),
            };
            vec![polygon_slacks(&values, tol)?.min_slack]
        }
        Relation::Majorization => {
            let Drawn::Gaussian(cm) = &drawn else {
                unreachable!("validated Gaussian system")
            };
            let d = single_party_symplectic(state)?;
            let s = symplectic_spectrum(cm)?;
            vec![majorization_gap(&d, s.values())?]
        }
    };
    let violated = slacks.iter().any(|s| *s < -tol || s.is_nan());
    Ok(SampleOutcome {
        slacks,
        state: violated.then(|| drawn.encode()),
    })
}

fn single_party_symplectic(state: PartyState<'_>) -> Result<Vec<f64>> {
    match state.single_party_spectra()? {
        MarginalSpectra::Gaussian(s) => Ok(s.iter().flat_map(|x| x.values().to_vec()).collect()),
        MarginalSpectra::Discrete(_) => Err(Error::Config("majorization needs a Gaussian state".into())),
    }
}

/// Runs the configured relation over `samples` seeded random states.
pub fn campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let run = || -> Result<Vec<SampleOutcome>> {
        (0..config.samples).into_par_iter().map(|i| evaluate(config, i)).collect()
    };
    let outcomes = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let keys = config.keys();
    let mut per_spec: BTreeMap<String, SpecOutcome> = BTreeMap::new();
    for (k, key) in keys.iter().enumerate() {
        let mut out = SpecOutcome {
            checked: 0,
            violations: 0,
            worst_slack: None,
            worst_index: None,
            witnesses: Vec::new(),
        };
        for (i, o) in outcomes.iter().enumerate() {
            let slack = o.slacks[k];
            out.checked += 1;
            if out.worst_slack.is_none_or(|w| slack < w || slack.is_nan()) {
                out.worst_slack = Some(slack);
                out.worst_index = Some(i);
            }
            if slack < -config.tolerance || slack.is_nan() {
                out.violations += 1;
                if out.witnesses.len() < config.max_witnesses {
                    out.witnesses.push(Witness {
                        seed: config.seed,
                        sample_index: i,
                        slack,
                        state: o.state.clone().expect("violating samples keep their state"),
                    });
                }
            }
        }
        per_spec.insert(key.clone(), out);
    }
    Ok(CampaignReport {
        config: config.clone(),
        per_spec,
    })
}
