//! Gaussian states through their covariance matrices.
//!
//! Conventions: quadratures are ordered `(q₁, p₁, …, q_n, p_n)` and the vacuum
//! has covariance matrix `I`, so every symplectic eigenvalue is `≥ 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};
use crate::tolerance::Tolerances;

/// Symplectic eigenvalues within this distance of 1 are treated as exactly 1.
const NEAR_PURE: f64 = 1e-10;

/// Default bound on the generator norm of random symplectic matrices.
pub const DEFAULT_Z_MAX: f64 = 2.0;

/// Largest supported number of modes.
pub const MAX_MODES: usize = 64;

/// Real symmetric `2n × 2n` covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry and the bona fide condition.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let report = validate_cm(&entries)?;
        if !report.valid {
            return Err(Error::NotBonaFide(report.min_symplectic.unwrap_or(f64::NAN)));
        }
        Ok(Self {
            entries: symmetrize(&entries),
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        Self {
            entries: symmetrize(&entries),
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        CovarianceMatrix {
            entries: block_diag(&[self.entries.clone(), other.entries.clone()]),
        }
    }

    /// Congruence `S σ Sᵀ` by a symplectic matrix.
    pub fn transform(&self, s: &SymplecticMatrix) -> Result<CovarianceMatrix> {
        if s.entries.nrows() != self.entries.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.nrows(),
                got: s.entries.nrows(),
            });
        }
        Ok(Self::from_trusted(&s.entries * &self.entries * s.entries.transpose()))
    }

    /// Principal submatrix on the given modes (ascending order).
    pub fn submatrix_modes(&self, modes: &[usize]) -> CovarianceMatrix {
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = idx.len();
        CovarianceMatrix {
            entries: DMatrix::from_fn(k, k, |i, j| self.entries[(idx[i], idx[j])]),
        }
    }
}

/// Symplectic eigenvalues, non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    /// Validates `s_i ≥ 1 - 1e-8` and sorts.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty symplectic spectrum".into()));
        }
        if let Some(&bad) = values
            .iter()
            .find(|s| !s.is_finite() || **s < 1.0 - Tolerances::DEFAULT.bona_fide)
        {
            return Err(Error::NotBonaFide(bad));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `tr ρ² = Π 1/s_i`.
    pub fn purity(&self) -> f64 {
        self.values.iter().map(|s| 1.0 / s).product()
    }
}

/// Per-party mode counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModePartition {
    sizes: Vec<usize>,
}

impl ModePartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("no parties".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition("every party needs at least one mode".into()));
        }
        let total = sizes.iter().try_fold(0usize, |a, &m| a.checked_add(m));
        if total.is_none_or(|t| t > MAX_MODES) {
            return Err(Error::InvalidPartition("too many modes".into()));
        }
        Ok(Self { sizes })
    }

    /// One mode per party.
    pub fn singletons(n: usize) -> Result<Self> {
        if n > MAX_MODES {
            return Err(Error::InvalidPartition("too many modes".into()));
        }
        Self::new(vec![1; n])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_parties(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_modes(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Modes owned by `party`.
    pub fn modes_of(&self, party: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..party].iter().sum();
        start..start + self.sizes[party]
    }

    pub fn check_matches(&self, sigma: &CovarianceMatrix) -> Result<()> {
        if self.n_modes() != sigma.n_modes() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} modes, state has {}",
                self.n_modes(),
                sigma.n_modes()
            )));
        }
        Ok(())
    }

    /// Validated, sorted, deduplicated party set.
    pub fn normalize_parties(&self, parties: &[usize]) -> Result<Vec<usize>> {
        if parties.is_empty() {
            return Err(Error::InvalidParties("empty party set".into()));
        }
        let mut keep = parties.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&p| p >= self.n_parties()) {
            return Err(Error::InvalidParties(format!(
                "party {bad} out of range for {} parties",
                self.n_parties()
            )));
        }
        Ok(keep)
    }

    /// Partition of the kept parties.
    pub fn restrict(&self, keep: &[usize]) -> ModePartition {
        ModePartition {
            sizes: keep.iter().map(|&p| self.sizes[p]).collect(),
        }
    }
}

/// Real `2n × 2n` matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Accepts `S` when `‖S Ω Sᵀ − Ω‖∞ ≤ 1e-8`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare(entries.nrows(), entries.ncols()));
        }
        if !entries.nrows().is_multiple_of(2) {
            return Err(Error::OddDimension(entries.nrows()));
        }
        let s = Self { entries };
        let defect = s.symplectic_defect();
        if defect > 1e-8 {
            return Err(Error::Domain(format!("matrix is not symplectic (defect {defect:e})")));
        }
        Ok(s)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `‖S Ω Sᵀ − Ω‖∞`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.entries.nrows() / 2).entries;
        max_abs(&(&self.entries * &omega * self.entries.transpose() - omega))
    }

    pub fn direct_sum(blocks: &[SymplecticMatrix]) -> SymplecticMatrix {
        let mats: Vec<DMatrix<f64>> = blocks.iter().map(|b| b.entries.clone()).collect();
        SymplecticMatrix {
            entries: block_diag(&mats),
        }
    }
}

/// `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(n: usize) -> SymplecticMatrix {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    SymplecticMatrix { entries: m }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub n_modes: usize,
    pub symmetry_defect: f64,
    pub positive_definite: bool,
    /// `None` when the matrix is not positive definite.
    pub min_symplectic: Option<f64>,
    pub valid: bool,
    pub pure: bool,
}

/// Checks a raw matrix against the covariance-matrix contract.
///
/// Odd or non-square dimensions and asymmetry beyond `1e-10` are errors; a
/// violated uncertainty principle is reported through `valid = false`.
pub fn validate_cm(m: &DMatrix<f64>) -> Result<ValidityReport> {
    let tol = Tolerances::DEFAULT;
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::OddDimension(m.nrows()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite covariance entry".into()));
    }
    let defect = linalg::symmetric_defect(m);
    if defect > tol.cm_symmetry {
        return Err(Error::NotSymmetric(defect));
    }
    let sym = symmetrize(m);
    let (evals, _) = linalg::symmetric_eigen(&sym)?;
    let n_modes = m.nrows() / 2;
    if evals[0] <= 0.0 {
        return Ok(ValidityReport {
            n_modes,
            symmetry_defect: defect,
            positive_definite: false,
            min_symplectic: None,
            valid: false,
            pure: false,
        });
    }
    let s = raw_symplectic_eigenvalues(&sym)?;
    let min = s[0];
    let valid = min >= 1.0 - tol.bona_fide;
    Ok(ValidityReport {
        n_modes,
        symmetry_defect: defect,
        positive_definite: true,
        min_symplectic: Some(min),
        valid,
        pure: valid && s.iter().all(|v| (v - 1.0).abs() <= tol.pure_flag),
    })
}

/// Positive eigenvalues of the Hermitian matrix `i σ^{1/2} Ω σ^{1/2}`, ascending.
fn raw_symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = sigma.nrows() / 2;
    let a = antisymmetric_core(sigma)?;
    let ia = a.map(|x| Complex64::new(0.0, x));
    let values = linalg::hermitian_eigenvalues(&ia)?;
    let mut s: Vec<f64> = values[..n].to_vec();
    s.sort_by(|x, y| x.total_cmp(y));
    Ok(s)
}

/// `σ^{1/2} Ω σ^{1/2}`, real antisymmetric.
fn antisymmetric_core(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = sigma.nrows() / 2;
    let root = linalg::symmetric_function(sigma, f64::sqrt)?;
    let omega = symplectic_form(n).entries;
    let a = &root * omega * &root;
    Ok((&a - a.transpose()) * 0.5)
}

pub fn symplectic_spectrum(sigma: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let mut values = raw_symplectic_eigenvalues(&sigma.entries)?;
    for v in values.iter_mut() {
        // validated states may sit a hair below 1
        if *v < 1.0 {
            *v = 1.0;
        }
    }
    Ok(SymplecticSpectrum { values })
}

/// Williamson normal form `S σ Sᵀ = diag(s₁, s₁, …, s_n, s_n)`.
#[derive(Debug, Clone)]
pub struct Williamson {
    pub symplectic: SymplecticMatrix,
    /// Symplectic eigenvalues in the order they appear on the diagonal (ascending).
    pub spectrum: Vec<f64>,
    /// `‖S σ Sᵀ − D‖∞`.
    pub congruence_residual: f64,
    /// `‖S Ω Sᵀ − Ω‖∞`.
    pub symplectic_residual: f64,
}

impl Williamson {
    pub fn diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2 * self.spectrum.len(),
            self.spectrum.iter().flat_map(|&s| [s, s]),
        ))
    }
}

/// Williamson decomposition assembled from the eigenvectors of `i σ^{1/2} Ω σ^{1/2}`.
///
/// For an eigenvector `v = x + i y` with eigenvalue `s > 0` the real vectors
/// `e = √2 x`, `f = √2 y` satisfy `A e = s f`, `A f = −s e`; with
/// `O = [f₁ e₁ f₂ e₂ …]` one gets `Oᵀ A O = D Ω` and `S = D^{1/2} Oᵀ σ^{−1/2}`.
/// The `±s` eigenspaces are separated by `2s ≥ 2`, so degenerate `s` need no
/// special pairing.
pub fn williamson(sigma: &CovarianceMatrix) -> Result<Williamson> {
    let n = sigma.n_modes();
    let a = antisymmetric_core(&sigma.entries)?;
    let ia = a.map(|x| Complex64::new(0.0, x));
    let (values, vectors) = linalg::hermitian_eigen(&ia)?;
    // values are non-increasing; the first n are the +s_k, reverse to ascending
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(2 * n);
    let mut spectrum = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let v = vectors.column(k);
        let e = v.map(|z| z.re * std::f64::consts::SQRT_2);
        let f = v.map(|z| z.im * std::f64::consts::SQRT_2);
        cols.push(f);
        cols.push(e);
        spectrum.push(values[k]);
    }
    gram_schmidt(&mut cols);
    let o = DMatrix::from_columns(&cols);
    let inv_root = linalg::symmetric_function(&sigma.entries, |x| 1.0 / x.sqrt())?;
    let d_half = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        2 * n,
        spectrum.iter().flat_map(|&s: &f64| [s.sqrt(), s.sqrt()]),
    ));
    let s = d_half * o.transpose() * inv_root;
    let symplectic = SymplecticMatrix { entries: s };
    let mut w = Williamson {
        symplectic,
        spectrum,
        congruence_residual: 0.0,
        symplectic_residual: 0.0,
    };
    let d = w.diagonal();
    let se = &w.symplectic.entries;
    w.congruence_residual = max_abs(&(se * &sigma.entries * se.transpose() - d));
    w.symplectic_residual = w.symplectic.symplectic_defect();
    Ok(w)
}

fn gram_schmidt(cols: &mut [nalgebra::DVector<f64>]) {
    for i in 0..cols.len() {
        for j in 0..i {
            let proj = cols[j].dot(&cols[i]);
            let cj = cols[j].clone();
            cols[i] -= cj * proj;
        }
        let norm = cols[i].norm();
        cols[i] /= norm;
    }
}

/// Covariance matrix of the kept parties (principal submatrix).
pub fn marginal_cm(sigma: &CovarianceMatrix, partition: &ModePartition, keep: &[usize]) -> Result<CovarianceMatrix> {
    partition.check_matches(sigma)?;
    let keep = partition.normalize_parties(keep)?;
    let modes: Vec<usize> = keep.iter().flat_map(|&p| partition.modes_of(p)).collect();
    Ok(sigma.submatrix_modes(&modes))
}

/// Two-mode squeezed vacuum with squeezing `r`.
pub fn two_mode_squeezed(r: f64) -> Result<CovarianceMatrix> {
    if !r.is_finite() {
        return Err(Error::Domain("squeezing must be finite".into()));
    }
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    Ok(CovarianceMatrix::from_trusted(m))
}

/// Single-mode squeezed vacuum `diag(e^{2r}, e^{−2r})`.
pub fn single_mode_squeezed(r: f64) -> CovarianceMatrix {
    CovarianceMatrix::from_trusted(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        (2.0 * r).exp(),
        (-2.0 * r).exp(),
    ])))
}

/// `S = exp(Ω H)` for a random symmetric `H` rescaled so `‖Ω H‖₂ = u · z_max`, `u ~ U(0, 1)`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, z_max: f64, rng: &mut R) -> Result<SymplecticMatrix> {
    if n == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    if !(z_max > 0.0 && z_max.is_finite()) {
        return Err(Error::Domain(format!("z_max must be positive, got {z_max}")));
    }
    let dim = 2 * n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x: f64 = rng.sample(StandardNormal);
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    let (evals, _) = linalg::symmetric_eigen(&h)?;
    let norm = evals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let u: f64 = rng.random();
    let scale = if norm > 0.0 { u * z_max / norm } else { 0.0 };
    let omega = symplectic_form(n).entries;
    let generator = omega * h * scale;
    Ok(SymplecticMatrix {
        entries: generator.exp(),
    })
}

/// Kind of random covariance matrix to draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CmKind {
    Pure,
    /// Symplectic eigenvalues uniform in `[1, s_max]`.
    Mixed { s_max: f64 },
}

/// Random covariance matrix with the default squeezing bound.
pub fn random_cm<R: Rng + ?Sized>(n: usize, kind: CmKind, rng: &mut R) -> Result<CovarianceMatrix> {
    random_cm_planted(n, kind, DEFAULT_Z_MAX, rng).map(|(cm, _)| cm)
}

/// `σ = S D Sᵀ` together with the planted spectrum `D` (ascending).
pub fn random_cm_planted<R: Rng + ?Sized>(
    n: usize,
    kind: CmKind,
    z_max: f64,
    rng: &mut R,
) -> Result<(CovarianceMatrix, Vec<f64>)> {
    let planted: Vec<f64> = match kind {
        CmKind::Pure => vec![1.0; n],
        CmKind::Mixed { s_max } => {
            if !(s_max >= 1.0 && s_max.is_finite()) {
                return Err(Error::Domain(format!("s_max must be ≥ 1, got {s_max}")));
            }
            (0..n).map(|_| 1.0 + (s_max - 1.0) * rng.random::<f64>()).collect()
        }
    };
    let s = random_symplectic(n, z_max, rng)?;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        2 * n,
        planted.iter().flat_map(|&x| [x, x]),
    ));
    let sigma = CovarianceMatrix::from_trusted(&s.entries * d * s.entries.transpose());
    let mut sorted = planted;
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok((sigma, sorted))
}

/// Pure `2n`-mode purification: Williamson reduction, one two-mode squeezer
/// per mode with `cosh 2r_i = s_i`, ancilla modes appended after the system.
pub fn gaussian_purify(sigma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let n = sigma.n_modes();
    let w = williamson(sigma)?;
    let m = w
        .symplectic
        .entries
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular Williamson transform".into()))?;
    let dim = 4 * n;
    let mut gamma = DMatrix::<f64>::zeros(dim, dim);
    for (k, &s) in w.spectrum.iter().enumerate() {
        let s = if s - 1.0 < NEAR_PURE { 1.0 } else { s };
        let c = (s * s - 1.0).max(0.0).sqrt();
        let (q, p) = (2 * k, 2 * k + 1);
        let (qa, pa) = (2 * n + 2 * k, 2 * n + 2 * k + 1);
        gamma[(q, q)] = s;
        gamma[(p, p)] = s;
        gamma[(qa, qa)] = s;
        gamma[(pa, pa)] = s;
        gamma[(q, qa)] = c;
        gamma[(qa, q)] = c;
        gamma[(p, pa)] = -c;
        gamma[(pa, p)] = -c;
    }
    let lift = block_diag(&[m, DMatrix::identity(2 * n, 2 * n)]);
    Ok(CovarianceMatrix::from_trusted(&lift * gamma * lift.transpose()))
}

/// Result of bringing every party's reduced covariance matrix to Williamson form.
#[derive(Debug, Clone)]
pub struct LocalNormalForm {
    pub sigma_prime: CovarianceMatrix,
    /// Local symplectic eigenvalues per party, ascending within each party.
    pub local_spectra: Vec<Vec<f64>>,
    pub transform: SymplecticMatrix,
}

impl LocalNormalForm {
    /// All local symplectic eigenvalues, party by party.
    pub fn diagonal_pairs(&self) -> Vec<f64> {
        self.local_spectra.iter().flatten().copied().collect()
    }
}

/// Applies `V_{A_1} ⊕ ⋯ ⊕ V_{A_N}` with each `V` the party's own Williamson transform.
pub fn local_normal_form(sigma: &CovarianceMatrix, partition: &ModePartition) -> Result<LocalNormalForm> {
    partition.check_matches(sigma)?;
    let mut blocks = Vec::with_capacity(partition.n_parties());
    let mut local_spectra = Vec::with_capacity(partition.n_parties());
    for p in 0..partition.n_parties() {
        let modes: Vec<usize> = partition.modes_of(p).collect();
        let local = sigma.submatrix_modes(&modes);
        let w = williamson(&local)?;
        local_spectra.push(w.spectrum.clone());
        blocks.push(w.symplectic);
    }
    let transform = SymplecticMatrix::direct_sum(&blocks);
    let sigma_prime = sigma.transform(&transform)?;
    Ok(LocalNormalForm {
        sigma_prime,
        local_spectra,
        transform,
    })
}

/// Single-mode symplectic eigenvalue `√det` of each mode's `2 × 2` block.
pub fn single_mode_eigenvalues(sigma: &CovarianceMatrix) -> Vec<f64> {
    (0..sigma.n_modes())
        .map(|k| {
            let e = &sigma.entries;
            let det = e[(2 * k, 2 * k)] * e[(2 * k + 1, 2 * k + 1)] - e[(2 * k, 2 * k + 1)] * e[(2 * k + 1, 2 * k)];
            det.max(0.0).sqrt()
        })
        .collect()
}

/// True when every symplectic eigenvalue is within `tol` of 1.
pub fn is_pure(sigma: &CovarianceMatrix, tol: f64) -> Result<bool> {
    Ok(symplectic_spectrum(sigma)?.values().iter().all(|s| s - 1.0 <= tol))
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}
