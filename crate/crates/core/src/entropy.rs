//! Von Neumann, Rényi and Tsallis entropies of discrete spectra and of
//! Gaussian symplectic spectra, the single-qubit / single-mode entropy
//! functions, and their closed-form derivatives.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discrete::{spectrum, DensityMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::gaussian::{symplectic_spectrum, CovarianceMatrix, SymplecticSpectrum};

/// Below this distance from 1 a symplectic eigenvalue contributes no entropy.
const NEAR_PURE_MODE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EntropyFamily {
    VonNeumann,
    Renyi(f64),
    Tsallis(f64),
}

/// Entropy family, order and logarithm base.
///
/// String form: `S`, `S:b=2`, `R:p=2`, `R:p=2:b=2`, `T:q=1.5`. The base defaults
/// to 2 and is ignored by the Tsallis family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EntropySpec {
    family: EntropyFamily,
    log_base: f64,
}

impl EntropySpec {
    pub const DEFAULT_BASE: f64 = 2.0;

    pub fn new(family: EntropyFamily, log_base: f64) -> Result<Self> {
        if !(log_base.is_finite() && log_base > 1.0) {
            return Err(Error::InvalidSpec(format!("log base must be > 1, got {log_base}")));
        }
        match family {
            EntropyFamily::Renyi(o) | EntropyFamily::Tsallis(o) if !(o.is_finite() && o > 1.0) => {
                return Err(Error::InvalidSpec(format!("order must be > 1, got {o}")));
            }
            _ => {}
        }
        // T_q does not depend on the base; one canonical value keeps Display round-trips exact
        let log_base = match family {
            EntropyFamily::Tsallis(_) => Self::DEFAULT_BASE,
            _ => log_base,
        };
        Ok(Self { family, log_base })
    }

    pub fn von_neumann() -> Self {
        Self {
            family: EntropyFamily::VonNeumann,
            log_base: Self::DEFAULT_BASE,
        }
    }

    pub fn renyi(p: f64) -> Result<Self> {
        Self::new(EntropyFamily::Renyi(p), Self::DEFAULT_BASE)
    }

    pub fn tsallis(q: f64) -> Result<Self> {
        Self::new(EntropyFamily::Tsallis(q), Self::DEFAULT_BASE)
    }

    pub fn with_base(self, log_base: f64) -> Result<Self> {
        Self::new(self.family, log_base)
    }

    pub fn family(&self) -> EntropyFamily {
        self.family
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    /// Rényi/Tsallis order, `None` for von Neumann.
    pub fn order(&self) -> Option<f64> {
        match self.family {
            EntropyFamily::VonNeumann => None,
            EntropyFamily::Renyi(o) | EntropyFamily::Tsallis(o) => Some(o),
        }
    }

    fn ln_base(&self) -> f64 {
        self.log_base.ln()
    }

    /// Parses the string form, using `default_base` when no `b=` field is given.
    pub fn parse_with_base(s: &str, default_base: f64) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidSpec(format!("{msg}: {s:?}"));
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or("");
        let mut order = None;
        let mut base = None;
        for field in parts {
            let (key, value) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let slot = match key.trim() {
                "p" if head == "R" => &mut order,
                "q" if head == "T" => &mut order,
                "b" => &mut base,
                _ => return Err(bad("unknown field")),
            };
            if slot.is_some() {
                return Err(bad("duplicate field"));
            }
            *slot = Some(parse_number(value.trim()).ok_or_else(|| bad("malformed number"))?);
        }
        let family = match head {
            "S" => EntropyFamily::VonNeumann,
            "R" => EntropyFamily::Renyi(order.ok_or_else(|| bad("missing p"))?),
            "T" => EntropyFamily::Tsallis(order.ok_or_else(|| bad("missing q"))?),
            _ => return Err(bad("unknown family")),
        };
        Self::new(family, base.unwrap_or(default_base))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "e" => Some(std::f64::consts::E),
        _ => s.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

impl FromStr for EntropySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_base(s, Self::DEFAULT_BASE)
    }
}

impl fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            EntropyFamily::VonNeumann => write!(f, "S:b={}", self.log_base),
            EntropyFamily::Renyi(p) => write!(f, "R:p={p}:b={}", self.log_base),
            EntropyFamily::Tsallis(q) => write!(f, "T:q={q}"),
        }
    }
}

impl TryFrom<String> for EntropySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EntropySpec> for String {
    fn from(e: EntropySpec) -> String {
        e.to_string()
    }
}

/// `S = −Σ λ log λ`, `R_p = log(Σ λ^p)/(1−p)`, `T_q = (1 − Σ λ^q)/(q−1)`.
pub fn entropy_discrete(spec: &Spectrum, e: &EntropySpec) -> f64 {
    entropy_of_probabilities(spec.values(), e)
}

fn entropy_of_probabilities(values: &[f64], e: &EntropySpec) -> f64 {
    match e.family {
        EntropyFamily::VonNeumann => {
            -values
                .iter()
                .filter(|&&l| l > 0.0)
                .map(|&l| l * l.ln())
                .sum::<f64>()
                / e.ln_base()
        }
        EntropyFamily::Renyi(p) => {
            let trace: f64 = values.iter().map(|&l| l.powf(p)).sum();
            trace.ln() / ((1.0 - p) * e.ln_base())
        }
        EntropyFamily::Tsallis(q) => {
            let trace: f64 = values.iter().map(|&l| l.powf(q)).sum();
            (1.0 - trace) / (q - 1.0)
        }
    }
}

/// `g_x(y) = 2^x / ((y+1)^x − (y−1)^x)`, so that `tr ρ^x = Π g_x(s_i)`.
pub fn g_factor(y: f64, x: f64) -> Result<f64> {
    if !(y.is_finite() && y >= 1.0) {
        return Err(Error::Domain(format!("g_x(y) needs y ≥ 1, got {y}")));
    }
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::Domain(format!("g_x(y) needs x > 1, got {x}")));
    }
    Ok(g_unchecked(y, x))
}

fn g_unchecked(y: f64, x: f64) -> f64 {
    1.0 / (((y + 1.0) / 2.0).powf(x) - ((y - 1.0) / 2.0).powf(x))
}

/// Per-mode von Neumann term `((s+1)/2) log((s+1)/2) − ((s−1)/2) log((s−1)/2)`.
fn mode_von_neumann(s: f64, ln_base: f64) -> f64 {
    if s - 1.0 < NEAR_PURE_MODE {
        return 0.0;
    }
    let a = (s + 1.0) / 2.0;
    let b = (s - 1.0) / 2.0;
    (a * a.ln() - b * b.ln()) / ln_base
}

/// Entropy of a Gaussian state from its symplectic spectrum.
pub fn entropy_gaussian(s: &SymplecticSpectrum, e: &EntropySpec) -> f64 {
    entropy_of_symplectic(s.values(), e)
}

fn entropy_of_symplectic(values: &[f64], e: &EntropySpec) -> f64 {
    let active = values.iter().copied().filter(|s| s - 1.0 >= NEAR_PURE_MODE);
    match e.family {
        EntropyFamily::VonNeumann => active.map(|s| mode_von_neumann(s, e.ln_base())).sum(),
        EntropyFamily::Renyi(p) => {
            let log_trace: f64 = active.map(|s| g_unchecked(s, p).ln()).sum();
            log_trace / ((1.0 - p) * e.ln_base())
        }
        EntropyFamily::Tsallis(q) => {
            let trace: f64 = active.map(|s| g_unchecked(s, q)).product();
            (1.0 - trace) / (q - 1.0)
        }
    }
}

/// Entropy of a raw list of symplectic eigenvalues (each `≥ 1`).
pub fn entropy_of_symplectic_values(values: &[f64], e: &EntropySpec) -> Result<f64> {
    if let Some(bad) = values.iter().find(|s| !(s.is_finite() && **s >= 1.0 - 1e-8)) {
        return Err(Error::Domain(format!("symplectic eigenvalue {bad} < 1")));
    }
    Ok(entropy_of_symplectic(values, e))
}

/// Entropy of a qubit with eigenvalues `{λ, 1 − λ}`, `λ ∈ [0, 1/2]`.
pub fn qubit_entropy_fn(lambda: f64, e: &EntropySpec) -> Result<f64> {
    if !(0.0..=0.5).contains(&lambda) {
        return Err(Error::Domain(format!("λ must lie in [0, 1/2], got {lambda}")));
    }
    Ok(entropy_of_probabilities(&[lambda, 1.0 - lambda], e))
}

/// Entropy of a single mode with symplectic eigenvalue `s ≥ 1`.
pub fn mode_entropy_fn(s: f64, e: &EntropySpec) -> Result<f64> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::Domain(format!("s must be ≥ 1, got {s}")));
    }
    if s - 1.0 < NEAR_PURE_MODE {
        return Ok(0.0);
    }
    Ok(match e.family {
        EntropyFamily::VonNeumann => mode_von_neumann(s, e.ln_base()),
        EntropyFamily::Renyi(p) => {
            let inner = (s + 1.0).powf(p) - (s - 1.0).powf(p);
            (inner.ln() - p * std::f64::consts::LN_2) / ((p - 1.0) * e.ln_base())
        }
        EntropyFamily::Tsallis(q) => (1.0 - 2f64.powf(q) / ((s + 1.0).powf(q) - (s - 1.0).powf(q))) / (q - 1.0),
    })
}

/// A discrete density matrix or a Gaussian covariance matrix.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Discrete(&'a DensityMatrix),
    Gaussian(&'a CovarianceMatrix),
}

pub fn entropy_of_state(state: StateRef<'_>, e: &EntropySpec) -> Result<f64> {
    match state {
        StateRef::Discrete(rho) => Ok(entropy_discrete(&spectrum(rho)?, e)),
        StateRef::Gaussian(cm) => Ok(entropy_gaussian(&symplectic_spectrum(cm)?, e)),
    }
}

/// Which single-variable entropy function to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeKind {
    /// `f_E(λ)`, `λ ∈ (0, 1/2]`.
    QubitF,
    /// `g_E(s̃ + 1)` in the shifted variable `s̃ = s − 1 > 0`.
    ModeGShifted,
}

/// Closed-form first or second derivative of the qubit or shifted single-mode
/// entropy function.
pub fn derivative(kind: DerivativeKind, e: &EntropySpec, order: u8, point: f64) -> Result<f64> {
    if order != 1 && order != 2 {
        return Err(Error::Domain(format!("derivative order must be 1 or 2, got {order}")));
    }
    match kind {
        DerivativeKind::QubitF => {
            if !(point > 0.0 && point <= 0.5) {
                return Err(Error::Domain(format!("λ must lie in (0, 1/2], got {point}")));
            }
            Ok(qubit_derivative(e, order, point))
        }
        DerivativeKind::ModeGShifted => {
            if !(point > 0.0 && point.is_finite()) {
                return Err(Error::Domain(format!("s̃ must be > 0, got {point}")));
            }
            Ok(mode_derivative(e, order, point))
        }
    }
}

fn qubit_derivative(e: &EntropySpec, order: u8, l: f64) -> f64 {
    let m = 1.0 - l;
    let lb = e.ln_base();
    match (e.family, order) {
        (EntropyFamily::VonNeumann, 1) => (m.ln() - l.ln()) / lb,
        (EntropyFamily::VonNeumann, _) => -(1.0 / l + 1.0 / m) / lb,
        (EntropyFamily::Renyi(p), 1) => {
            let u = l.powf(p) + m.powf(p);
            p * (m.powf(p - 1.0) - l.powf(p - 1.0)) / ((p - 1.0) * u * lb)
        }
        (EntropyFamily::Renyi(p), _) => {
            let u = l.powf(p) + m.powf(p);
            let d = m.powf(p - 1.0) - l.powf(p - 1.0);
            (p * d * d - p * (p - 1.0) * l.powf(p - 2.0) * m.powf(p - 2.0)) / ((p - 1.0) * u * u * lb)
        }
        (EntropyFamily::Tsallis(q), 1) => q * (m.powf(q - 1.0) - l.powf(q - 1.0)) / (q - 1.0),
        (EntropyFamily::Tsallis(q), _) => -q * (m.powf(q - 2.0) + l.powf(q - 2.0)),
    }
}

fn mode_derivative(e: &EntropySpec, order: u8, s: f64) -> f64 {
    let a = s + 2.0;
    let lb = e.ln_base();
    match (e.family, order) {
        (EntropyFamily::VonNeumann, 1) => 0.5 * (1.0 + 2.0 / s).ln() / lb,
        (EntropyFamily::VonNeumann, _) => -1.0 / (s * a * lb),
        (EntropyFamily::Renyi(p), 1) => {
            let u = a.powf(p) - s.powf(p);
            p * (a.powf(p - 1.0) - s.powf(p - 1.0)) / ((p - 1.0) * u * lb)
        }
        (EntropyFamily::Renyi(p), _) => {
            let u = a.powf(p) - s.powf(p);
            let d = a.powf(p - 1.0) - s.powf(p - 1.0);
            (-4.0 * p * (p - 1.0) * a.powf(p - 2.0) * s.powf(p - 2.0) - p * d * d) / ((p - 1.0) * u * u * lb)
        }
        (EntropyFamily::Tsallis(q), 1) => {
            let u = a.powf(q) - s.powf(q);
            2f64.powf(q) * q * (a.powf(q - 1.0) - s.powf(q - 1.0)) / ((q - 1.0) * u * u)
        }
        (EntropyFamily::Tsallis(q), _) => {
            let u = a.powf(q) - s.powf(q);
            let d = a.powf(q - 1.0) - s.powf(q - 1.0);
            let u3 = u * u * u;
            -(2f64.powf(q + 2.0) * q * a.powf(q - 2.0) * s.powf(q - 2.0)) / u3
                - 2f64.powf(q) * q * (q + 1.0) * d * d / ((q - 1.0) * u3)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSample {
    pub point: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub kind: DerivativeKind,
    pub spec: EntropySpec,
    pub samples: Vec<DerivativeSample>,
    /// `f′ ≥ 0` at every grid point.
    pub nondecreasing: bool,
    /// `f″ ≤ 0` at every grid point.
    pub concave: bool,
    /// Smallest and largest grid points with `f″ > 0`, if any.
    pub convex_region: Option<(f64, f64)>,
}

/// Signs of `f′` and `f″` across a grid.
pub fn monotonicity_scan(kind: DerivativeKind, e: &EntropySpec, grid: &[f64]) -> Result<MonotonicityReport> {
    const SIGN_TOL: f64 = 1e-12;
    let samples = grid
        .iter()
        .map(|&x| {
            Ok(DerivativeSample {
                point: x,
                first: derivative(kind, e, 1, x)?,
                second: derivative(kind, e, 2, x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let convex: Vec<f64> = samples.iter().filter(|s| s.second > SIGN_TOL).map(|s| s.point).collect();
    let convex_region = convex.iter().copied().reduce(f64::min).zip(convex.iter().copied().reduce(f64::max));
    Ok(MonotonicityReport {
        kind,
        spec: *e,
        nondecreasing: samples.iter().all(|s| s.first >= -SIGN_TOL),
        concave: convex.is_empty(),
        convex_region,
        samples,
    })
}
