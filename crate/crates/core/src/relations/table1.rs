//! The property-by-system matrix for subadditivity and the polygon relation,
//! filled from seeded campaigns and explicit counterexamples.

use serde::Serialize;

use super::campaign::{campaign, CampaignConfig, CampaignReport, Relation};
use super::demos::{purified_equivalence_demo, wstate_violation, DEFAULT_WSTATE_GRID};
use super::{subadditivity_check, Bipartition, PartyState};
use crate::discrete::{DensityMatrix, DimsLayout};
use crate::entropy::EntropySpec;
use crate::error::Result;
use crate::io::{cell, CsvRows};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Holds,
    Fails,
    Open,
}

impl CellStatus {
    pub fn symbol(self) -> &'static str {
        match self {
            CellStatus::Holds => "✓",
            CellStatus::Fails => "✗",
            CellStatus::Open => "?",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub source: String,
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Cell {
    pub property: &'static str,
    pub family: &'static str,
    pub system: &'static str,
    pub qualifier: Option<&'static str>,
    pub expected: CellStatus,
    pub observed: CellStatus,
    pub matches: bool,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub samples: usize,
    pub seed: u64,
    pub cells: Vec<Table1Cell>,
    pub all_match: bool,
}

impl Table1Report {
    /// Fixed-width text rendering of the matrix.
    pub fn render_matrix(&self) -> String {
        let mut out = format!("{:<14} {:<4} {:<12} {:<9} {:<9} {:<8} {}\n", "property", "E", "system", "qualifier", "expected", "observed", "match");
        for c in &self.cells {
            out.push_str(&format!(
                "{:<14} {:<4} {:<12} {:<9} {:<9} {:<8} {}\n",
                c.property,
                c.family,
                c.system,
                c.qualifier.unwrap_or("-"),
                c.expected.symbol(),
                c.observed.symbol(),
                if c.matches { "yes" } else { "NO" }
            ));
        }
        out
    }
}

impl CsvRows for Table1Report {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["property", "family", "system", "qualifier", "expected", "observed", "matches", "checked", "violations", "worst_slack"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                let checked: usize = c.evidence.iter().map(|e| e.checked).sum();
                let violations: usize = c.evidence.iter().map(|e| e.violations).sum();
                let worst = c.evidence.iter().filter_map(|e| e.worst_slack).fold(None, |m: Option<f64>, s| {
                    Some(m.map_or(s, |m| m.min(s)))
                });
                vec![
                    c.property.to_string(),
                    c.family.to_string(),
                    c.system.to_string(),
                    c.qualifier.unwrap_or("").to_string(),
                    c.expected.symbol().to_string(),
                    c.observed.symbol().to_string(),
                    c.matches.to_string(),
                    checked.to_string(),
                    violations.to_string(),
                    worst.map(cell).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

const RENYI_CHECKED: [&str; 3] = ["R:p=1.5", "R:p=2", "R:p=3"];
const RENYI_LOW: [&str; 2] = ["R:p=1.5", "R:p=2"];
const TSALLIS_CHECKED: [&str; 3] = ["T:q=1.5", "T:q=2", "T:q=3"];

fn specs(list: &[&str]) -> Vec<EntropySpec> {
    list.iter().map(|s| s.parse().expect("built-in spec strings parse")).collect()
}

fn key(s: &str) -> String {
    s.parse::<EntropySpec>().expect("built-in spec strings parse").to_string()
}

struct Runner {
    samples: usize,
    seed: u64,
    workers: Option<usize>,
}

impl Runner {
    fn run(&self, system: &str, relation: Relation, spec_list: &[&str]) -> Result<CampaignReport> {
        let mut cfg = CampaignConfig::new(
            system.parse().expect("built-in system strings parse"),
            relation,
            specs(spec_list),
            self.samples,
            self.seed,
        );
        cfg.workers = self.workers;
        campaign(&cfg)
    }
}

fn campaign_evidence(reports: &[&CampaignReport], spec_list: &[&str]) -> Vec<Evidence> {
    let mut out = Vec::new();
    for r in reports {
        for s in spec_list {
            let k = key(s);
            let o = &r.per_spec[&k];
            out.push(Evidence {
                source: format!("campaign {} {} {}", r.config.system, r.config.relation.name(), k),
                checked: o.checked,
                violations: o.violations,
                worst_slack: o.worst_slack,
            });
        }
    }
    out
}

fn counterexample(source: String, slack: f64) -> Evidence {
    Evidence {
        source,
        checked: 1,
        violations: usize::from(slack < -Tolerances::DEFAULT.witness),
        worst_slack: Some(slack),
    }
}

fn observed_from(evidence: &[Evidence]) -> CellStatus {
    if evidence.iter().any(|e| e.violations > 0) {
        CellStatus::Fails
    } else {
        CellStatus::Holds
    }
}

fn make_cell(
    property: &'static str,
    family: &'static str,
    system: &'static str,
    qualifier: Option<&'static str>,
    expected: CellStatus,
    observed: CellStatus,
    evidence: Vec<Evidence>,
) -> Table1Cell {
    Table1Cell {
        property,
        family,
        system,
        qualifier,
        expected,
        observed,
        matches: expected == observed,
        evidence,
    }
}

/// Non-Gaussian entries inherit the qudit verdict; qudit states are a subclass.
fn inherit(from: &Table1Cell, expected: CellStatus) -> Table1Cell {
    make_cell(
        from.property,
        from.family,
        "non-gaussian",
        None,
        expected,
        from.observed,
        vec![Evidence {
            source: format!("inherited from {} {} qudit", from.property, from.family),
            checked: 0,
            violations: 0,
            worst_slack: None,
        }],
    )
}

fn open(property: &'static str, family: &'static str) -> Table1Cell {
    make_cell(property, family, "non-gaussian", None, CellStatus::Open, CellStatus::Open, Vec::new())
}

/// `diag(0.5, 0.3, 0.2, 0)` on two qubits.
pub(crate) fn diagonal_counterexample() -> DensityMatrix {
    DensityMatrix::diagonal(&[0.5, 0.3, 0.2, 0.0], DimsLayout::qubits(2).expect("two qubits"))
        .expect("valid diagonal state")
}

/// The same probabilities embedded in two qutrits.
pub(crate) fn padded_counterexample() -> DensityMatrix {
    let mut p = vec![0.0; 9];
    p[0] = 0.5;
    p[1] = 0.3;
    p[3] = 0.2;
    DensityMatrix::diagonal(&p, DimsLayout::new(vec![3, 3]).expect("two qutrits")).expect("valid diagonal state")
}

/// Runs every implemented cell with `samples` states per campaign.
pub fn table1(samples: usize, seed: u64, workers: Option<usize>) -> Result<Table1Report> {
    use CellStatus::{Fails, Holds};
    let run = Runner { samples, seed, workers };
    let tol = Tolerances::DEFAULT.violation;
    let r2 = EntropySpec::renyi(2.0)?;

    let sub_spec_discrete = ["S", "T:q=1.5", "T:q=2", "T:q=3"];
    let sub_spec_gauss = ["S", "R:p=1.5", "R:p=2", "R:p=3", "T:q=1.5", "T:q=2", "T:q=3"];
    let poly_spec_qubit = ["S", "R:p=1.5", "R:p=2", "T:q=1.5", "T:q=2", "T:q=3"];

    let sub_qubit = run.run("qudits:2,2", Relation::Subadditivity, &sub_spec_discrete)?;
    let sub_qudit = run.run("qudits:3,3", Relation::Subadditivity, &sub_spec_discrete)?;
    let sub_g1 = run.run("gaussian:1,1", Relation::Subadditivity, &sub_spec_gauss)?;
    let sub_g2 = run.run("gaussian:2,1", Relation::Subadditivity, &sub_spec_gauss)?;
    let poly_q3 = run.run("qubits:3", Relation::Polygon, &poly_spec_qubit)?;
    let poly_q4 = run.run("qubits:4", Relation::Polygon, &poly_spec_qubit)?;
    let poly_qudit = run.run("qudits:3,3,3", Relation::Polygon, &sub_spec_discrete)?;
    let poly_g1 = run.run("gaussian:1,1,1", Relation::Polygon, &sub_spec_gauss)?;
    let poly_g2 = run.run("gaussian:2,1,1", Relation::Polygon, &sub_spec_gauss)?;

    let diag = diagonal_counterexample();
    let sub_diag = subadditivity_check(PartyState::Density(&diag), &Bipartition::pair(), &r2, tol)?;
    let padded = padded_counterexample();
    let sub_padded = subadditivity_check(PartyState::Density(&padded), &Bipartition::pair(), &r2, tol)?;
    let wstate = wstate_violation(3.0, 3, &DEFAULT_WSTATE_GRID, EntropySpec::DEFAULT_BASE)?;
    let wstate_slack = wstate.points.iter().map(|p| p.state_slack).fold(f64::INFINITY, f64::min);
    let purified = purified_equivalence_demo(PartyState::Density(&diag), &r2, tol)?;

    let sub = "subadditivity";
    let poly = "polygon";
    let mut cells = Vec::new();

    let e = campaign_evidence(&[&sub_qubit], &["S"]);
    cells.push(make_cell(sub, "S", "qubit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&sub_qudit], &["S"]);
    cells.push(make_cell(sub, "S", "qudit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&sub_g1, &sub_g2], &["S"]);
    cells.push(make_cell(sub, "S", "gaussian", None, Holds, observed_from(&e), e));
    let from = cells[1].clone();
    cells.push(inherit(&from, Holds));

    let e = vec![counterexample("diagonal (0.5,0.3,0.2,0), R:p=2".into(), sub_diag.mutual_information)];
    cells.push(make_cell(sub, "R", "qubit", None, Fails, observed_from(&e), e));
    let e = vec![counterexample("diagonal (0.5,0.3,0.2,0) in 3x3, R:p=2".into(), sub_padded.mutual_information)];
    cells.push(make_cell(sub, "R", "qudit", None, Fails, observed_from(&e), e));
    let e = campaign_evidence(&[&sub_g1, &sub_g2], &RENYI_CHECKED);
    cells.push(make_cell(sub, "R", "gaussian", Some("p>1"), Holds, observed_from(&e), e));
    let from = cells[5].clone();
    cells.push(inherit(&from, Fails));

    let e = campaign_evidence(&[&sub_qubit], &TSALLIS_CHECKED);
    cells.push(make_cell(sub, "T", "qubit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&sub_qudit], &TSALLIS_CHECKED);
    cells.push(make_cell(sub, "T", "qudit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&sub_g1, &sub_g2], &TSALLIS_CHECKED);
    cells.push(make_cell(sub, "T", "gaussian", Some("q>1"), Holds, observed_from(&e), e));
    cells.push(open(sub, "T"));

    let e = campaign_evidence(&[&poly_q3, &poly_q4], &["S"]);
    cells.push(make_cell(poly, "S", "qubit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&poly_qudit], &["S"]);
    cells.push(make_cell(poly, "S", "qudit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&poly_g1, &poly_g2], &["S"]);
    cells.push(make_cell(poly, "S", "gaussian", None, Holds, observed_from(&e), e));
    let from = cells[13].clone();
    cells.push(inherit(&from, Holds));

    let e = campaign_evidence(&[&poly_q3, &poly_q4], &RENYI_LOW);
    cells.push(make_cell(poly, "R", "qubit", Some("p<=2"), Holds, observed_from(&e), e));
    let e = vec![counterexample("W-class grid, 3 qubits, R:p=3".into(), wstate_slack)];
    cells.push(make_cell(poly, "R", "qubit", Some("p>2"), Fails, observed_from(&e), e));
    let e = vec![counterexample(
        "purified diagonal (0.5,0.3,0.2,0) on (2,2,3), ancilla party, R:p=2".into(),
        purified.ancilla_slack,
    )];
    cells.push(make_cell(poly, "R", "qudit", None, Fails, observed_from(&e), e));
    let e = campaign_evidence(&[&poly_g1, &poly_g2], &RENYI_CHECKED);
    cells.push(make_cell(poly, "R", "gaussian", Some("p>1"), Holds, observed_from(&e), e));
    let from = cells[18].clone();
    cells.push(inherit(&from, Fails));

    let e = campaign_evidence(&[&poly_q3, &poly_q4], &TSALLIS_CHECKED);
    cells.push(make_cell(poly, "T", "qubit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&poly_qudit], &TSALLIS_CHECKED);
    cells.push(make_cell(poly, "T", "qudit", None, Holds, observed_from(&e), e));
    let e = campaign_evidence(&[&poly_g1, &poly_g2], &TSALLIS_CHECKED);
    cells.push(make_cell(poly, "T", "gaussian", Some("q>1"), Holds, observed_from(&e), e));
    cells.push(open(poly, "T"));

    let all_match = cells.iter().all(|c| c.matches);
    Ok(Table1Report {
        samples,
        seed,
        cells,
        all_match,
    })
}
