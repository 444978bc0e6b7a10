//! Worked constructions: the W-class Rényi counterexample, the purification
//! equivalence between subadditivity and the polygon relation, the Gaussian
//! polygon proof chain, and the GHZ marginal illustration.

use serde::Serialize;

use super::{
    bipartite_spectra, one_to_rest, polygon_slacks, subadditivity_from_spectra, Bipartition, MarginalSpectra,
    PartyState, PolygonReport, SubadditivityReport,
};
use crate::discrete::{named_state, purify, NamedState};
use crate::entropy::{entropy_of_symplectic_values, g_factor, qubit_entropy_fn, EntropyFamily, EntropySpec};
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_purify, local_normal_form, marginal_cm, symplectic_spectrum, CovarianceMatrix, ModePartition};
use crate::io::{cell, encode_vector, CsvRows, StateJson};
use crate::tolerance::Tolerances;

/// Default `a₁²` grid for the W-class search.
pub const DEFAULT_WSTATE_GRID: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.98];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WStatePoint {
    pub a1_sq: f64,
    /// Smallest single-qubit marginal eigenvalues `(1 − a₁², a₂², …)`.
    pub lambdas: Vec<f64>,
    /// Minimum polygon slack of `f_{R_p}(λ_i)` evaluated in closed form.
    pub closed_form_slack: f64,
    /// Minimum polygon slack from the state's reduced density matrices.
    pub state_slack: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WStateWitness {
    pub a1_sq: f64,
    pub slack: f64,
    pub state: StateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WStateFindings {
    pub spec: EntropySpec,
    pub n_qubits: usize,
    pub points: Vec<WStatePoint>,
    pub violations: Vec<f64>,
    pub witness: Option<WStateWitness>,
    pub witness_tolerance: f64,
}

impl CsvRows for WStateFindings {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["a1_sq", "closed_form_slack", "state_slack", "violated"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| vec![cell(p.a1_sq), cell(p.closed_form_slack), cell(p.state_slack), p.violated.to_string()])
            .collect()
    }
}

/// Evaluates the Rényi-`p` polygon relation on `W`-class states with amplitude
/// `a₁² ∈ grid` on the first qubit and the remaining weight split evenly.
pub fn wstate_violation(p: f64, n: usize, grid: &[f64], log_base: f64) -> Result<WStateFindings> {
    if !(p.is_finite() && p > 2.0) {
        return Err(Error::Domain(format!("the W-class search needs p > 2, got {p}")));
    }
    if n < 3 {
        return Err(Error::Domain(format!("the W-class search needs N ≥ 3 qubits, got {n}")));
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty a₁² grid".into()));
    }
    if let Some(a) = grid.iter().find(|a| !(0.5..1.0).contains(*a)) {
        return Err(Error::Domain(format!("a₁² must lie in [1/2, 1), got {a}")));
    }
    let spec = EntropySpec::renyi(p)?.with_base(log_base)?;
    let tol = Tolerances::DEFAULT;
    let mut points = Vec::with_capacity(grid.len());
    let mut witness: Option<WStateWitness> = None;
    for &a1_sq in grid {
        let rest = (1.0 - a1_sq) / (n - 1) as f64;
        let mut lambdas = vec![1.0 - a1_sq];
        lambdas.extend(std::iter::repeat_n(rest, n - 1));
        let f: Vec<f64> = lambdas.iter().map(|&l| qubit_entropy_fn(l, &spec)).collect::<Result<_>>()?;
        let closed_form_slack = polygon_slacks(&f, tol.violation)?.min_slack;

        let mut amps = vec![a1_sq.sqrt()];
        amps.extend(std::iter::repeat_n(rest.sqrt(), n - 1));
        let psi = named_state(&NamedState::WClass(amps))?;
        let v = one_to_rest(PartyState::Vector(&psi), &spec)?;
        let state_slack = polygon_slacks(&v.values, tol.violation)?.min_slack;
        let violated = state_slack < -tol.witness;
        if violated && witness.as_ref().is_none_or(|w| state_slack < w.slack) {
            witness = Some(WStateWitness {
                a1_sq,
                slack: state_slack,
                state: encode_vector(&psi),
            });
        }
        points.push(WStatePoint {
            a1_sq,
            lambdas,
            closed_form_slack,
            state_slack,
            violated,
        });
    }
    Ok(WStateFindings {
        spec,
        n_qubits: n,
        violations: points.iter().filter(|p| p.violated).map(|p| p.a1_sq).collect(),
        points,
        witness,
        witness_tolerance: tol.witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub subadditivity: SubadditivityReport,
    /// Polygon report of the purified three-party state `(A, B, C)`.
    pub purified_polygon: PolygonReport,
    pub ancilla_slack: f64,
    /// `|ancilla slack − mutual information|`.
    pub discrepancy: f64,
    pub consistent: bool,
}

impl CsvRows for EquivalenceReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["spec", "mutual_information", "ancilla_slack", "discrepancy", "consistent"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.subadditivity.spec.to_string(),
            cell(self.subadditivity.mutual_information),
            cell(self.ancilla_slack),
            cell(self.discrepancy),
            self.consistent.to_string(),
        ]]
    }
}

/// Spectra needed for the equivalence check: `ρ_AB`, `ρ_A`, `ρ_B` of the input
/// and the three single-party marginals of its purification.
pub(crate) fn equivalence_spectra(state: PartyState<'_>) -> Result<(MarginalSpectra, MarginalSpectra)> {
    if state.n_parties() != 2 {
        return Err(Error::InvalidParties(format!(
            "equivalence demo needs a bipartite state, got {} parties",
            state.n_parties()
        )));
    }
    let bip = bipartite_spectra(state, &Bipartition::pair())?;
    let purified = match state {
        PartyState::Vector(v) => {
            let psi = purify(&v.to_density())?;
            PartyState::Vector(&psi).single_party_spectra()?
        }
        PartyState::Density(rho) => {
            let psi = purify(rho)?;
            PartyState::Vector(&psi).single_party_spectra()?
        }
        PartyState::Gaussian(cm, part) => {
            part.check_matches(cm)?;
            let pure = gaussian_purify(cm)?;
            let mut sizes = part.sizes().to_vec();
            sizes.push(cm.n_modes());
            let big = ModePartition::new(sizes)?;
            PartyState::Gaussian(&pure, &big).single_party_spectra()?
        }
    };
    Ok((bip, purified))
}

pub(crate) fn equivalence_from_spectra(
    bip: &MarginalSpectra,
    purified: &MarginalSpectra,
    e: &EntropySpec,
    tol: f64,
) -> Result<EquivalenceReport> {
    let subadditivity = subadditivity_from_spectra(bip, e, tol);
    let purified_polygon = polygon_slacks(&purified.entropies(e), tol)?;
    let ancilla_slack = purified_polygon.slacks[2];
    let discrepancy = (ancilla_slack - subadditivity.mutual_information).abs();
    Ok(EquivalenceReport {
        subadditivity,
        purified_polygon,
        ancilla_slack,
        discrepancy,
        consistent: discrepancy <= Tolerances::DEFAULT.violation,
    })
}

/// Purifies a bipartite state `ρ_AB` to `|ψ⟩_ABC` and compares the polygon
/// slack at the ancilla `C` with the subadditivity slack of `ρ_AB`.
pub fn purified_equivalence_demo(state: PartyState<'_>, e: &EntropySpec, tol: f64) -> Result<EquivalenceReport> {
    let (bip, purified) = equivalence_spectra(state)?;
    equivalence_from_spectra(&bip, &purified, e, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    /// `lhs ≤ rhs`; gap `= rhs − lhs`.
    Inequality,
    /// `lhs = rhs`; gap `= −|lhs − rhs|`.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofLink {
    pub name: &'static str,
    pub kind: LinkKind,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

impl ProofLink {
    fn new(name: &'static str, kind: LinkKind, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = match kind {
            LinkKind::Inequality => rhs - lhs,
            LinkKind::Equality => -(lhs - rhs).abs(),
        };
        Self {
            name,
            kind,
            lhs,
            rhs,
            gap,
            holds: gap >= -tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Trace {
    pub spec: EntropySpec,
    pub excluded: usize,
    /// Symplectic spectrum of the state of the remaining parties.
    pub rest_spectrum: Vec<f64>,
    /// Local symplectic eigenvalues of the remaining parties.
    pub local_spectrum: Vec<f64>,
    pub links: Vec<ProofLink>,
    pub polygon_slack: f64,
    pub min_gap: f64,
    pub all_hold: bool,
    pub tolerance: f64,
}

impl CsvRows for Theorem2Trace {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["link", "kind", "lhs", "rhs", "gap", "holds"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.links
            .iter()
            .map(|l| {
                vec![
                    l.name.to_string(),
                    format!("{:?}", l.kind).to_lowercase(),
                    cell(l.lhs),
                    cell(l.rhs),
                    cell(l.gap),
                    l.holds.to_string(),
                ]
            })
            .collect()
    }
}

fn tsallis_trace(values: &[f64], q: f64) -> Result<f64> {
    values.iter().map(|&s| g_factor(s.max(1.0), q)).product()
}

/// Verifies each link of the Gaussian polygon proof for party `excluded`
/// (default: the last party) of a pure state.
pub fn theorem2_proof_trace(
    sigma: &CovarianceMatrix,
    partition: &ModePartition,
    e: &EntropySpec,
    excluded: Option<usize>,
    tol: f64,
) -> Result<Theorem2Trace> {
    partition.check_matches(sigma)?;
    let n_parties = partition.n_parties();
    if n_parties < 2 {
        return Err(Error::InvalidPartition("the polygon relation needs ≥ 2 parties".into()));
    }
    let excluded = excluded.unwrap_or(n_parties - 1);
    if excluded >= n_parties {
        return Err(Error::InvalidParties(format!("party {excluded} out of range for {n_parties} parties")));
    }
    let global = symplectic_spectrum(sigma)?;
    let worst = global.values().iter().fold(0.0f64, |m, s| m.max(s - 1.0));
    if worst > Tolerances::DEFAULT.purity {
        return Err(Error::NotPure(global.purity()));
    }

    let rest: Vec<usize> = (0..n_parties).filter(|&i| i != excluded).collect();
    let rest_cm = marginal_cm(sigma, partition, &rest)?;
    let rest_partition = partition.restrict(&rest);
    let s: Vec<f64> = symplectic_spectrum(&rest_cm)?.values().to_vec();
    let nf = local_normal_form(&rest_cm, &rest_partition)?;
    let d: Vec<f64> = nf.diagonal_pairs();

    let e_excluded = entropy_of_symplectic_values(symplectic_spectrum(&marginal_cm(sigma, partition, &[excluded])?)?.values(), e)?;
    let e_locals: Vec<f64> = rest
        .iter()
        .map(|&i| {
            let local = symplectic_spectrum(&marginal_cm(sigma, partition, &[i])?)?;
            entropy_of_symplectic_values(local.values(), e)
        })
        .collect::<Result<_>>()?;
    let sum_locals: f64 = e_locals.iter().sum();
    let g_s = entropy_of_symplectic_values(&s, e)?;

    let diag_residual = (0..d.len())
        .flat_map(|k| [(2 * k, d[k]), (2 * k + 1, d[k])])
        .map(|(i, v)| (nf.sigma_prime.entries()[(i, i)] - v).abs())
        .fold(0.0, f64::max);

    use LinkKind::{Equality, Inequality};
    let mut links = vec![
        ProofLink::new("rest_symmetry", Equality, e_excluded, g_s, tol),
        ProofLink::new("normal_form_diagonal", Equality, diag_residual, 0.0, tol),
        ProofLink::new("weak_majorization", Inequality, 0.0, super::majorization_gap(&d, &s)?, tol),
    ];
    match e.family() {
        EntropyFamily::VonNeumann | EntropyFamily::Renyi(_) => {
            let g_d = entropy_of_symplectic_values(&d, e)?;
            links.push(ProofLink::new("sum_inequality", Inequality, g_s, g_d, tol));
            links.push(ProofLink::new("local_additivity", Equality, g_d, sum_locals, tol));
        }
        EntropyFamily::Tsallis(q) => {
            let h_s = tsallis_trace(&s, q)?;
            let h_d = tsallis_trace(&d, q)?;
            let per_party: Vec<f64> = nf
                .local_spectra
                .iter()
                .map(|v| tsallis_trace(v, q))
                .collect::<Result<_>>()?;
            let sum_one_minus: f64 = per_party.iter().map(|x| 1.0 - x).sum();
            links.push(ProofLink::new("product_majorization", Inequality, h_d, h_s, tol));
            links.push(ProofLink::new("product_inequality", Inequality, 1.0 - h_d, sum_one_minus, tol));
            links.push(ProofLink::new("local_additivity", Equality, sum_one_minus / (q - 1.0), sum_locals, tol));
        }
    }
    links.push(ProofLink::new("polygon", Inequality, e_excluded, sum_locals, tol));
    let polygon_slack = sum_locals - e_excluded;
    let min_gap = links.iter().map(|l| l.gap).fold(f64::INFINITY, f64::min);
    Ok(Theorem2Trace {
        spec: *e,
        excluded,
        rest_spectrum: s,
        local_spectrum: d,
        all_hold: links.iter().all(|l| l.holds),
        links,
        polygon_slack,
        min_gap,
        tolerance: tol,
    })
}

const GHZ_ANNOTATION: &str = "rho_AB is an equal mixture of |00><00| and |11><11|, a separable state, so every \
entanglement measure of rho_AB is 0 (analytic fact, not computed)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzReport {
    pub spec: EntropySpec,
    pub e_ab: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_c: f64,
    /// `E(ρ_{A|BC}) = E(ρ_A)` for the pure three-qubit state.
    pub e_a_bc: f64,
    /// `E(ρ_B) + E(ρ_C) − E(ρ_{A|BC})`.
    pub monogamy_slack: f64,
    pub monogamy_holds: bool,
    pub e_ab_positive: bool,
    /// `ρ_AB` has no off-diagonal entries in the product basis.
    pub rho_ab_diagonal: bool,
    pub annotation: &'static str,
}

impl CsvRows for GhzReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["spec", "e_ab", "e_a", "e_b", "e_c", "e_a_bc", "monogamy_slack", "e_ab_positive"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.spec.to_string(),
            cell(self.e_ab),
            cell(self.e_a),
            cell(self.e_b),
            cell(self.e_c),
            cell(self.e_a_bc),
            cell(self.monogamy_slack),
            self.e_ab_positive.to_string(),
        ]]
    }
}

/// Entropies of the three-qubit GHZ state and its marginals.
pub fn ghz_monogamy_demo(e: &EntropySpec) -> Result<GhzReport> {
    let psi = named_state(&NamedState::Ghz(3))?;
    let state = PartyState::Vector(&psi);
    let v = state.marginal_spectra(&[&[0, 1], &[0], &[1], &[2]])?.entropies(e);
    let rho_ab = psi.reduced(&[0, 1])?;
    let m = rho_ab.entries();
    let off_diagonal = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    let tol = Tolerances::DEFAULT.violation;
    let slack = v[2] + v[3] - v[1];
    Ok(GhzReport {
        spec: *e,
        e_ab: v[0],
        e_a: v[1],
        e_b: v[2],
        e_c: v[3],
        e_a_bc: v[1],
        monogamy_slack: slack,
        monogamy_holds: slack >= -tol,
        e_ab_positive: v[0] > tol,
        rho_ab_diagonal: off_diagonal <= 1e-12,
        annotation: GHZ_ANNOTATION,
    })
}
