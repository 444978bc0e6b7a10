//! Polygon relations, subadditivity, marginal-spectrum inequalities, weak
//! majorization and monotone transforms of one-to-rest entropy vectors.

mod campaign;
mod demos;
mod table1;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::discrete::{partial_trace, spectrum, DensityMatrix, Spectrum, StateVector};
use crate::entropy::{entropy_discrete, entropy_gaussian, EntropySpec};
use crate::error::{Error, Result};
use crate::gaussian::{is_pure, marginal_cm, symplectic_spectrum, CovarianceMatrix, ModePartition, SymplecticSpectrum};
use crate::io::{cell, CsvRows};
use crate::tolerance::Tolerances;

pub use campaign::{
    campaign, CampaignConfig, CampaignReport, Relation, Sampler, SpecOutcome, SystemSpec, Witness, DEFAULT_MAX_WITNESSES,
};
pub use demos::{
    ghz_monogamy_demo, purified_equivalence_demo, theorem2_proof_trace, wstate_violation, EquivalenceReport, GhzReport,
    LinkKind, ProofLink, Theorem2Trace, WStateFindings, WStatePoint, WStateWitness, DEFAULT_WSTATE_GRID,
};
pub use table1::{table1, CellStatus, Table1Cell, Table1Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemTag {
    Discrete,
    Gaussian,
}

/// A multipartite state with its party structure.
#[derive(Debug, Clone, Copy)]
pub enum PartyState<'a> {
    Vector(&'a StateVector),
    Density(&'a DensityMatrix),
    Gaussian(&'a CovarianceMatrix, &'a ModePartition),
}

/// Spectra of a set of marginals, from which any entropy family is evaluated.
#[derive(Debug, Clone)]
pub enum MarginalSpectra {
    Discrete(Vec<Spectrum>),
    Gaussian(Vec<SymplecticSpectrum>),
}

impl MarginalSpectra {
    pub fn entropies(&self, e: &EntropySpec) -> Vec<f64> {
        match self {
            MarginalSpectra::Discrete(s) => s.iter().map(|x| entropy_discrete(x, e)).collect(),
            MarginalSpectra::Gaussian(s) => s.iter().map(|x| entropy_gaussian(x, e)).collect(),
        }
    }

    pub fn tag(&self) -> SystemTag {
        match self {
            MarginalSpectra::Discrete(_) => SystemTag::Discrete,
            MarginalSpectra::Gaussian(_) => SystemTag::Gaussian,
        }
    }
}

impl PartyState<'_> {
    pub fn n_parties(&self) -> usize {
        match self {
            PartyState::Vector(v) => v.layout().n_parties(),
            PartyState::Density(r) => r.layout().n_parties(),
            PartyState::Gaussian(_, p) => p.n_parties(),
        }
    }

    pub fn tag(&self) -> SystemTag {
        match self {
            PartyState::Gaussian(..) => SystemTag::Gaussian,
            _ => SystemTag::Discrete,
        }
    }

    /// Purity within `tol`: `tr ρ² ≥ 1 − tol`, or all symplectic eigenvalues within `tol` of 1.
    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        match self {
            PartyState::Vector(_) => Ok(true),
            PartyState::Density(r) => Ok(r.purity() >= 1.0 - tol),
            PartyState::Gaussian(cm, p) => {
                p.check_matches(cm)?;
                is_pure(cm, tol)
            }
        }
    }

    /// Spectrum of the marginal on `parties`.
    pub fn marginal_spectrum(&self, parties: &[usize]) -> Result<MarginalSpectra> {
        self.marginal_spectra(&[parties])
    }

    /// Spectra of several marginals.
    pub fn marginal_spectra(&self, sets: &[&[usize]]) -> Result<MarginalSpectra> {
        match self {
            PartyState::Vector(v) => Ok(MarginalSpectra::Discrete(
                sets.iter().map(|s| spectrum(&v.reduced(s)?)).collect::<Result<_>>()?,
            )),
            PartyState::Density(r) => Ok(MarginalSpectra::Discrete(
                sets.iter().map(|s| spectrum(&partial_trace(r, s)?)).collect::<Result<_>>()?,
            )),
            PartyState::Gaussian(cm, p) => Ok(MarginalSpectra::Gaussian(
                sets.iter()
                    .map(|s| symplectic_spectrum(&marginal_cm(cm, p, s)?))
                    .collect::<Result<_>>()?,
            )),
        }
    }

    /// Spectra of every single-party marginal.
    pub fn single_party_spectra(&self) -> Result<MarginalSpectra> {
        let singles: Vec<[usize; 1]> = (0..self.n_parties()).map(|i| [i]).collect();
        let sets: Vec<&[usize]> = singles.iter().map(|s| &s[..]).collect();
        self.marginal_spectra(&sets)
    }
}

/// One-to-rest entropies `E(ρ_{A_i})` of a pure multipartite state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneToRestVector {
    pub values: Vec<f64>,
    pub spec: EntropySpec,
    pub system: SystemTag,
}

/// Rejects mixed inputs: the one-to-rest identification needs a pure global state.
pub fn one_to_rest(state: PartyState<'_>, e: &EntropySpec) -> Result<OneToRestVector> {
    let tol = Tolerances::DEFAULT.purity;
    if !state.is_pure(tol)? {
        let p = match state {
            PartyState::Density(r) => r.purity(),
            _ => f64::NAN,
        };
        return Err(Error::NotPure(p));
    }
    let spectra = state.single_party_spectra()?;
    Ok(OneToRestVector {
        values: spectra.entropies(e),
        spec: *e,
        system: state.tag(),
    })
}

/// Per-party slack `Σ_{j≠i} E_j − E_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonReport {
    pub values: Vec<f64>,
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    pub worst_party: usize,
    pub holds: bool,
    pub tolerance: f64,
}

impl CsvRows for PolygonReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["party", "value", "slack", "holds"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.values
            .iter()
            .zip(&self.slacks)
            .enumerate()
            .map(|(i, (v, s))| vec![i.to_string(), cell(*v), cell(*s), (*s >= -self.tolerance).to_string()])
            .collect()
    }
}

/// Polygon slacks of an arbitrary value vector.
pub fn polygon_slacks(values: &[f64], tol: f64) -> Result<PolygonReport> {
    if values.len() < 2 {
        return Err(Error::Domain(format!("polygon relation needs ≥ 2 entries, got {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite entry {v}")));
    }
    let slacks: Vec<f64> = (0..values.len())
        .map(|i| {
            let rest: f64 = values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
            rest - values[i]
        })
        .collect();
    let (worst_party, min_slack) = slacks
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two entries");
    Ok(PolygonReport {
        values: values.to_vec(),
        slacks,
        min_slack,
        worst_party,
        holds: min_slack >= -tol,
        tolerance: tol,
    })
}

pub fn polygon_check(v: &OneToRestVector, tol: f64) -> Result<PolygonReport> {
    polygon_slacks(&v.values, tol)
}

/// Two disjoint, non-empty party groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Bipartition {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidParties("both sides of a bipartition must be non-empty".into()));
        }
        if a.iter().any(|x| b.contains(x)) {
            return Err(Error::InvalidParties("bipartition sides overlap".into()));
        }
        Ok(Self { a, b })
    }

    /// `{0} | {1}`.
    pub fn pair() -> Self {
        Self { a: vec![0], b: vec![1] }
    }

    fn union(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.a.iter().chain(&self.b).copied().collect();
        u.sort_unstable();
        u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub spec: EntropySpec,
    pub e_ab: f64,
    pub e_a: f64,
    pub e_b: f64,
    /// `E_A + E_B − E_AB`.
    pub mutual_information: f64,
    pub holds: bool,
    pub tolerance: f64,
}

impl CsvRows for SubadditivityReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["spec", "e_ab", "e_a", "e_b", "mutual_information", "holds"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.spec.to_string(),
            cell(self.e_ab),
            cell(self.e_a),
            cell(self.e_b),
            cell(self.mutual_information),
            self.holds.to_string(),
        ]]
    }
}

/// Spectra of `ρ_AB`, `ρ_A`, `ρ_B` in that order.
pub fn bipartite_spectra(state: PartyState<'_>, bip: &Bipartition) -> Result<MarginalSpectra> {
    let n = state.n_parties();
    if let Some(bad) = bip.a.iter().chain(&bip.b).find(|&&p| p >= n) {
        return Err(Error::InvalidParties(format!("party {bad} out of range for {n} parties")));
    }
    let ab = bip.union();
    state.marginal_spectra(&[&ab, &bip.a, &bip.b])
}

fn subadditivity_from_spectra(spectra: &MarginalSpectra, e: &EntropySpec, tol: f64) -> SubadditivityReport {
    let v = spectra.entropies(e);
    let mi = v[1] + v[2] - v[0];
    SubadditivityReport {
        spec: *e,
        e_ab: v[0],
        e_a: v[1],
        e_b: v[2],
        mutual_information: mi,
        holds: mi >= -tol,
        tolerance: tol,
    }
}

pub fn subadditivity_check(
    state: PartyState<'_>,
    bip: &Bipartition,
    e: &EntropySpec,
    tol: f64,
) -> Result<SubadditivityReport> {
    Ok(subadditivity_from_spectra(&bipartite_spectra(state, bip)?, e, tol))
}

pub fn mutual_information(state: PartyState<'_>, bip: &Bipartition, e: &EntropySpec) -> Result<f64> {
    Ok(subadditivity_check(state, bip, e, 0.0)?.mutual_information)
}

/// `λ_{A_i} ≤ Σ_{j≠i} λ_{A_j}` on the smallest marginal eigenvalues of a pure qubit state.
pub fn qubit_marginal_check(lambdas: &[f64], tol: f64) -> Result<PolygonReport> {
    if let Some(l) = lambdas.iter().find(|l| !(-1e-12..=0.5 + 1e-12).contains(*l)) {
        return Err(Error::Domain(format!("smallest qubit eigenvalue must lie in [0, 1/2], got {l}")));
    }
    polygon_slacks(lambdas, tol)
}

/// `s_i − 1 ≤ Σ_{j≠i}(s_j − 1)` on single-mode symplectic eigenvalues of a pure state.
pub fn gaussian_marginal_check(s: &[f64], tol: f64) -> Result<PolygonReport> {
    if let Some(x) = s.iter().find(|x| !(x.is_finite() && **x >= 1.0 - Tolerances::DEFAULT.bona_fide)) {
        return Err(Error::Domain(format!("symplectic eigenvalue must be ≥ 1, got {x}")));
    }
    let shifted: Vec<f64> = s.iter().map(|x| x - 1.0).collect();
    polygon_slacks(&shifted, tol)
}

/// Smallest eigenvalue of each single-qubit marginal.
pub fn smallest_qubit_eigenvalues(psi: &StateVector) -> Result<Vec<f64>> {
    if psi.layout().dims().iter().any(|&d| d != 2) {
        return Err(Error::InvalidLayout(format!("expected qubits, got {:?}", psi.layout().dims())));
    }
    match PartyState::Vector(psi).single_party_spectra()? {
        MarginalSpectra::Discrete(s) => Ok(s.iter().map(|x| x.min().min(0.5)).collect()),
        MarginalSpectra::Gaussian(_) => unreachable!("discrete input"),
    }
}

fn ascending(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// `min_k (Σ_{i≤k} x_(i) − Σ_{i≤k} y_(i))` over ascending orderings.
pub fn majorization_gap(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let (xs, ys) = (ascending(x), ascending(y));
    let (mut sx, mut sy, mut gap) = (0.0, 0.0, f64::INFINITY);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        gap = gap.min(sx - sy);
    }
    Ok(if x.is_empty() { 0.0 } else { gap })
}

/// True iff every ascending partial sum of `x` is at least that of `y`.
pub fn weak_majorization(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(majorization_gap(x, y)? >= 0.0)
}

/// Checks `f(x_i) ≤ Σ_{j≠i} f(x_j)` for inputs already satisfying the polygon condition.
pub fn lemma1_check(f: &dyn Fn(f64) -> f64, xs: &[f64], tol: f64) -> Result<bool> {
    if let Some(x) = xs.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain(format!("entries must be non-negative, got {x}")));
    }
    let base = polygon_slacks(xs, tol)?;
    if !base.holds {
        return Err(Error::Domain(format!(
            "input violates the polygon condition (slack {})",
            base.min_slack
        )));
    }
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    Ok(polygon_slacks(&fx, tol)?.holds)
}

/// A monotone (nondecreasing, concave, `f(0) = 0`) transform of entropy values.
#[derive(Clone)]
pub enum MonotoneTransform {
    Identity,
    Sqrt,
    /// `x ↦ (e^{(1−q) x ln b} − 1)/(1 − q)`, mapping `R_q` in base `b` to `T_q`.
    TsallisFromRenyi { q: f64, log_base: f64 },
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for MonotoneTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneTransform::Identity => write!(f, "Identity"),
            MonotoneTransform::Sqrt => write!(f, "Sqrt"),
            MonotoneTransform::TsallisFromRenyi { q, log_base } => {
                write!(f, "TsallisFromRenyi {{ q: {q}, log_base: {log_base} }}")
            }
            MonotoneTransform::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl MonotoneTransform {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MonotoneTransform::Identity => x,
            MonotoneTransform::Sqrt => x.max(0.0).sqrt(),
            MonotoneTransform::TsallisFromRenyi { q, log_base } => {
                ((1.0 - q) * x * log_base.ln()).exp_m1() / (1.0 - q)
            }
            MonotoneTransform::Custom { f, .. } => f(x),
        }
    }

    /// Grid check of `f(0) = 0`, monotonicity and concavity on `[0, hi]`.
    pub fn spot_check(&self, hi: f64) -> Result<()> {
        const POINTS: usize = 65;
        let hi = if hi.is_finite() && hi > 0.0 { hi } else { 1.0 };
        let ys: Vec<f64> = (0..POINTS)
            .map(|k| self.apply(hi * k as f64 / (POINTS - 1) as f64))
            .collect();
        let scale = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
        let tol = 1e-10 * scale;
        if !ys.iter().all(|y| y.is_finite()) {
            return Err(Error::Domain(format!("{self:?} is not finite on [0, {hi}]")));
        }
        if ys[0].abs() > tol {
            return Err(Error::Domain(format!("{self:?} has f(0) = {}", ys[0])));
        }
        if ys.windows(2).any(|w| w[1] - w[0] < -tol) {
            return Err(Error::Domain(format!("{self:?} is not nondecreasing on [0, {hi}]")));
        }
        if ys.windows(3).any(|w| w[2] - 2.0 * w[1] + w[0] > tol) {
            return Err(Error::Domain(format!("{self:?} is not concave on [0, {hi}]")));
        }
        Ok(())
    }
}

/// Polygon check of `f(E_i)` after spot-checking `f` on a grid covering the values.
pub fn transform_polygon(v: &OneToRestVector, f: &MonotoneTransform, tol: f64) -> Result<PolygonReport> {
    let hi = v.values.iter().fold(1.0f64, |m, x| m.max(*x)) * 1.25;
    f.spot_check(hi)?;
    let fx: Vec<f64> = v.values.iter().map(|&x| f.apply(x)).collect();
    polygon_slacks(&fx, tol)
}
