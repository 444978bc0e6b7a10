//! Finite-dimensional states: layouts, pure and mixed states, partial traces,
//! spectra, purification and random/named state generation.
//!
//! Tensor ordering: party 0 is the slowest-varying index. For dims
//! `(d_0, …, d_{k-1})` the basis index of `|i_0 … i_{k-1}⟩` is
//! `Σ_j i_j · Π_{l>j} d_l`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::Tolerances;

/// Largest supported total Hilbert-space dimension.
pub const MAX_TOTAL_DIM: usize = 1 << 16;

/// Local dimensions of the parties sharing a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimsLayout {
    dims: Vec<usize>,
}

impl DimsLayout {
    /// Every local dimension must be at least 2. Use [`DimsLayout::with_ancilla`]
    /// for purification ancillas, which may be one-dimensional.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLayout("no parties".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidLayout(format!("local dimension {d} < 2")));
        }
        Self::checked(dims)
    }

    pub fn qubits(n: usize) -> Result<Self> {
        // reject before allocating the dims vector
        if n > MAX_TOTAL_DIM.ilog2() as usize {
            return Err(Error::InvalidLayout(format!("{n} qubits exceed the total dimension limit")));
        }
        Self::new(vec![2; n])
    }

    /// Appends an ancilla party of dimension `ancilla ≥ 1`.
    pub fn with_ancilla(&self, ancilla: usize) -> Result<Self> {
        if ancilla == 0 {
            return Err(Error::InvalidLayout("ancilla dimension 0".into()));
        }
        let mut dims = self.dims.clone();
        dims.push(ancilla);
        Self::checked(dims)
    }

    fn checked(dims: Vec<usize>) -> Result<Self> {
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_TOTAL_DIM)
            .ok_or_else(|| Error::InvalidLayout("total dimension too large".into()))?;
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Validates a party set and returns it sorted and deduplicated.
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

    /// Layout restricted to the given (already normalized) parties.
    fn restrict(&self, keep: &[usize]) -> DimsLayout {
        DimsLayout {
            dims: keep.iter().map(|&p| self.dims[p]).collect(),
        }
    }

    /// For each full basis index, its index inside the kept and traced factors.
    fn split_indices(&self, keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
        let total = self.total_dim();
        let n = self.n_parties();
        let mut kept_mask = vec![false; n];
        for &p in keep {
            kept_mask[p] = true;
        }
        let mut kidx = vec![0usize; total];
        let mut tidx = vec![0usize; total];
        let dk: usize = keep.iter().map(|&p| self.dims[p]).product();
        let dt = total / dk;
        for full in 0..total {
            let mut rem = full;
            let mut digits = vec![0usize; n];
            for p in (0..n).rev() {
                digits[p] = rem % self.dims[p];
                rem /= self.dims[p];
            }
            let (mut k, mut t) = (0usize, 0usize);
            for p in 0..n {
                if kept_mask[p] {
                    k = k * self.dims[p] + digits[p];
                } else {
                    t = t * self.dims[p] + digits[p];
                }
            }
            kidx[full] = k;
            tidx[full] = t;
        }
        (kidx, tidx, dk, dt)
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    layout: DimsLayout,
}

impl StateVector {
    /// Builds a state from raw amplitudes, dividing by the norm.
    pub fn new(amplitudes: Vec<Complex64>, layout: DimsLayout) -> Result<Self> {
        check_len(amplitudes.len(), layout.total_dim())?;
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidAmplitudes("non-finite amplitude".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let amplitudes = DVector::from_iterator(amplitudes.len(), amplitudes.into_iter().map(|a| a / norm));
        Ok(Self { amplitudes, layout })
    }

    /// Accepts amplitudes that are already normalized, without rescaling them.
    pub fn from_normalized(amplitudes: Vec<Complex64>, layout: DimsLayout) -> Result<Self> {
        check_len(amplitudes.len(), layout.total_dim())?;
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidAmplitudes("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
            layout,
        })
    }

    /// Convenience constructor from real amplitudes.
    pub fn from_real(amplitudes: &[f64], layout: DimsLayout) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(), layout)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn layout(&self) -> &DimsLayout {
        &self.layout
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_parts(m, self.layout.clone())
    }

    /// Reduced state on `keep`, computed as `Ψ Ψ†` of the reshaped amplitude matrix.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = self.layout.normalize_parties(keep)?;
        let (kidx, tidx, dk, dt) = self.layout.split_indices(&keep);
        let mut psi = DMatrix::<Complex64>::zeros(dk, dt);
        for (full, a) in self.amplitudes.iter().enumerate() {
            psi[(kidx[full], tidx[full])] = *a;
        }
        let rho = &psi * psi.adjoint();
        Ok(DensityMatrix::from_parts(rho, self.layout.restrict(&keep)))
    }

    /// Replaces the layout; the total dimension must match.
    pub fn with_layout(mut self, layout: DimsLayout) -> Result<Self> {
        check_len(self.amplitudes.len(), layout.total_dim())?;
        self.layout = layout;
        Ok(self)
    }
}

/// Mixed (or pure) state as a Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    layout: DimsLayout,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: DMatrix<Complex64>, layout: DimsLayout) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare(entries.nrows(), entries.ncols()));
        }
        check_len(entries.nrows(), layout.total_dim())?;
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidAmplitudes("non-finite matrix entry".into()));
        }
        let defect = linalg::hermitian_defect(&entries);
        if defect > tol.normalization {
            return Err(Error::NotHermitian(defect));
        }
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > tol.normalization {
            return Err(Error::InvalidTrace(trace));
        }
        let rho = Self::from_parts(entries, layout);
        let min = linalg::hermitian_eigenvalues(&rho.entries)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol.eigen_clip {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(probabilities: &[f64], layout: DimsLayout) -> Result<Self> {
        check_len(probabilities.len(), layout.total_dim())?;
        let m = DMatrix::from_fn(probabilities.len(), probabilities.len(), |i, j| {
            if i == j {
                Complex64::new(probabilities[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, layout)
    }

    pub(crate) fn from_parts(entries: DMatrix<Complex64>, layout: DimsLayout) -> Self {
        Self { entries, layout }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn layout(&self) -> &DimsLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Relabels the parties; the total dimension must match.
    pub fn with_layout(mut self, layout: DimsLayout) -> Result<Self> {
        check_len(self.entries.nrows(), layout.total_dim())?;
        self.layout = layout;
        Ok(self)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        check_len(unitary.nrows(), self.dim())?;
        let m = unitary * &self.entries * unitary.adjoint();
        Ok(Self::from_parts(linalg::hermitize(&m), self.layout.clone()))
    }
}

/// Reduced state on the parties in `keep` (ascending order in the result).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = rho.layout.normalize_parties(keep)?;
    let (kidx, tidx, dk, _) = rho.layout.split_indices(&keep);
    let total = rho.dim();
    let mut out = DMatrix::<Complex64>::zeros(dk, dk);
    for a in 0..total {
        for b in 0..total {
            if tidx[a] == tidx[b] {
                out[(kidx[a], kidx[b])] += rho.entries[(a, b)];
            }
        }
    }
    Ok(DensityMatrix::from_parts(out, rho.layout.restrict(&keep)))
}

/// Eigenvalues of a density matrix, non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates, clips tiny negatives, renormalizes and sorts.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if values.is_empty() {
            return Err(Error::Domain("empty spectrum".into()));
        }
        if let Some(&v) = values
            .iter()
            .find(|v| !v.is_finite() || **v < -tol.eigen_clip || **v > 1.0 + tol.validation)
        {
            return Err(if v < 0.0 {
                Error::NotPositive(v)
            } else {
                Error::Domain(format!("eigenvalue {v} outside [0, 1]"))
            });
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol.validation {
            return Err(Error::InvalidTrace(sum));
        }
        Ok(Self::clip_and_sort(values))
    }

    fn clip_and_sort(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if sum != 1.0 {
            for v in values.iter_mut() {
                *v /= sum;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum is non-empty")
    }
}

/// Sorted eigenvalues of `rho`, with eigenvalues in `[-1e-10, 0)` clipped to zero.
pub fn spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    let values = linalg::hermitian_eigenvalues(&rho.entries)?;
    let tol = Tolerances::DEFAULT;
    if let Some(&min) = values.last() {
        if min < -tol.eigen_clip {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(Spectrum::clip_and_sort(values))
}

/// Purification `Σ_i √λ_i |λ_i⟩ ⊗ |i⟩` with an ancilla of dimension `rank(ρ)`,
/// appended as the last party.
pub fn purify(rho: &DensityMatrix) -> Result<StateVector> {
    const RANK_CUTOFF: f64 = 1e-12;
    let (values, vectors) = linalg::hermitian_eigen(&rho.entries)?;
    let kept: Vec<usize> = (0..values.len()).filter(|&k| values[k] > RANK_CUTOFF).collect();
    let rank = kept.len().max(1);
    let d = rho.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); d * rank];
    for (slot, &k) in kept.iter().enumerate() {
        let w = values[k].sqrt();
        for i in 0..d {
            amps[i * rank + slot] = vectors[(i, k)] * w;
        }
    }
    StateVector::new(amps, rho.layout.with_ancilla(rank)?)
}

/// Haar-random pure state: normalized vector of i.i.d. complex standard normals.
pub fn haar_random_pure<R: Rng + ?Sized>(layout: &DimsLayout, rng: &mut R) -> StateVector {
    let d = layout.total_dim();
    let amps: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    // A zero norm has probability zero for a Gaussian vector.
    StateVector::new(amps, layout.clone()).expect("Gaussian vector has non-zero norm")
}

/// `Tr_ancilla |ψ⟩⟨ψ|` for a Haar-random `|ψ⟩` on `(dim, rank)`; single-party layout `(dim)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let layout = DimsLayout::checked(vec![dim])?;
    let joint = layout.with_ancilla(rank)?;
    let psi = haar_random_pure(&joint, rng);
    psi.reduced(&[0])
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase correction.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Named multi-qubit states.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    /// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
    Ghz(usize),
    /// `Σ a_i |0…1_i…0⟩` with real, non-zero, normalized amplitudes.
    WClass(Vec<f64>),
}

pub fn named_state(kind: &NamedState) -> Result<StateVector> {
    match kind {
        NamedState::Ghz(n) => {
            if *n < 2 {
                return Err(Error::Domain(format!("GHZ needs at least 2 qubits, got {n}")));
            }
            let layout = DimsLayout::qubits(*n)?;
            let d = layout.total_dim();
            let mut amps = vec![0.0; d];
            amps[0] = 1.0;
            amps[d - 1] = 1.0;
            StateVector::from_real(&amps, layout)
        }
        NamedState::WClass(a) => {
            if a.len() < 2 {
                return Err(Error::Domain("W-class state needs at least 2 qubits".into()));
            }
            if a.iter().any(|x| !x.is_finite() || *x == 0.0) {
                return Err(Error::InvalidAmplitudes("W-class amplitudes must be finite and non-zero".into()));
            }
            let norm: f64 = a.iter().map(|x| x * x).sum();
            if (norm - 1.0).abs() > Tolerances::DEFAULT.validation {
                return Err(Error::NotNormalized(norm));
            }
            let n = a.len();
            let layout = DimsLayout::qubits(n)?;
            let mut amps = vec![0.0; layout.total_dim()];
            for (i, &ai) in a.iter().enumerate() {
                // qubit i excited: bit for party i has weight 2^(n-1-i)
                amps[1 << (n - 1 - i)] = ai;
            }
            StateVector::from_real(&amps, layout)
        }
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> StateVector {
        StateVector::from_real(&[1.0, 0.0, 0.0, 1.0], DimsLayout::qubits(2).unwrap()).unwrap()
    }

    #[test]
    fn build_normalizes() {
        let s = StateVector::from_real(&[1.0, 1.0], DimsLayout::new(vec![2]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, h, epsilon = 1e-15);

        let b = bell();
        assert_abs_diff_eq!(b.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_eq!(b.amplitudes()[1], c(0.0));
        assert_abs_diff_eq!(b.amplitudes()[3].re, h, epsilon = 1e-15);

        let basis = StateVector::from_real(&[1.0, 0.0, 0.0, 0.0], DimsLayout::qubits(2).unwrap()).unwrap();
        assert_eq!(basis.amplitudes()[0], c(1.0));
    }

    #[test]
    fn build_rejects_bad_input() {
        let l = DimsLayout::qubits(2).unwrap();
        assert!(matches!(
            StateVector::from_real(&[1.0, 0.0], l.clone()),
            Err(Error::DimensionMismatch { expected: 4, got: 2 })
        ));
        assert!(matches!(StateVector::from_real(&[0.0; 4], l), Err(Error::ZeroVector)));
        assert!(DimsLayout::new(vec![2, 1]).is_err());
        assert!(DimsLayout::new(vec![]).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = bell().to_density();
        let a = partial_trace(&rho, &[0]).unwrap();
        assert_abs_diff_eq!(a.entries()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.entries()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.entries()[(0, 1)].norm(), 0.0, epsilon = 1e-15);

        // |0⟩⟨0| ⊗ ρ_B
        let rho_b = [[0.7, 0.1], [0.1, 0.3]];
        let m = DMatrix::from_fn(4, 4, |i, j| {
            let (ai, bi) = (i / 2, i % 2);
            let (aj, bj) = (j / 2, j % 2);
            if ai == 0 && aj == 0 {
                c(rho_b[bi][bj])
            } else {
                c(0.0)
            }
        });
        let prod = DensityMatrix::new(m, DimsLayout::qubits(2).unwrap()).unwrap();
        let b = partial_trace(&prod, &[1]).unwrap();
        for (i, row) in rho_b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_abs_diff_eq!(b.entries()[(i, j)].re, v, epsilon = 1e-15);
            }
        }

        let ghz = named_state(&NamedState::Ghz(3)).unwrap().to_density();
        let ab = partial_trace(&ghz, &[0, 1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(ab.entries()[(i, j)].re, expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let rho = bell().to_density();
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
    }

    #[test]
    fn reduced_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = haar_random_pure(&DimsLayout::new(vec![2, 3, 2]).unwrap(), &mut rng);
        for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let a = psi.reduced(&keep).unwrap();
            let b = partial_trace(&psi.to_density(), &keep).unwrap();
            assert!((a.entries() - b.entries()).iter().all(|z| z.norm() < 1e-14));
            assert_eq!(a.layout(), b.layout());
        }
    }

    #[test]
    fn spectrum_examples() {
        let q = DimsLayout::new(vec![2]).unwrap();
        let mixed = DensityMatrix::diagonal(&[0.5, 0.5], q).unwrap();
        assert_eq!(spectrum(&mixed).unwrap().values().len(), 2);
        for v in spectrum(&mixed).unwrap().values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-15);
        }
        let pure = bell().to_density();
        let s = spectrum(&pure).unwrap();
        assert_abs_diff_eq!(s.values()[0], 1.0, epsilon = 1e-14);
        for v in &s.values()[1..] {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
        }
        let diag = DensityMatrix::diagonal(&[0.2, 0.5, 0.0, 0.3], DimsLayout::qubits(2).unwrap()).unwrap();
        let s = spectrum(&diag).unwrap();
        for (v, e) in s.values().iter().zip([0.5, 0.3, 0.2, 0.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn spectrum_clipping_rules() {
        let s = Spectrum::new(vec![0.6, 0.4 + 5e-11, -5e-11]).unwrap();
        assert_eq!(s.values()[2], 0.0);
        assert_abs_diff_eq!(s.values().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(matches!(Spectrum::new(vec![0.6, 0.5, -0.1]), Err(Error::NotPositive(_))));
    }

    #[test]
    fn density_validation() {
        let l = DimsLayout::new(vec![2]).unwrap();
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(DensityMatrix::new(not_herm, l.clone()), Err(Error::NotHermitian(_))));
        assert!(matches!(
            DensityMatrix::diagonal(&[0.6, 0.6], l.clone()),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(DensityMatrix::diagonal(&[1.2, -0.2], l), Err(Error::NotPositive(_))));
    }

    #[test]
    fn purify_examples() {
        let psi = bell();
        let p = purify(&psi.to_density()).unwrap();
        assert_eq!(p.layout().dims(), &[2, 2, 1]);
        let back = partial_trace(&p.to_density(), &[0, 1]).unwrap();
        assert!((back.entries() - psi.to_density().entries()).iter().all(|z| z.norm() < 1e-12));

        let mixed = DensityMatrix::diagonal(&[0.5, 0.5], DimsLayout::new(vec![2]).unwrap()).unwrap();
        let p = purify(&mixed).unwrap();
        assert_eq!(p.layout().dims(), &[2, 2]);
        let s = spectrum(&p.reduced(&[0]).unwrap()).unwrap();
        assert_abs_diff_eq!(s.values()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.norm_sqr(), 1.0, epsilon = 1e-14);

        let diag = DensityMatrix::diagonal(&[0.5, 0.3, 0.2, 0.0], DimsLayout::qubits(2).unwrap()).unwrap();
        let p = purify(&diag).unwrap();
        assert_eq!(p.layout().dims(), &[2, 2, 3]);
        assert_eq!(p.layout().total_dim(), 12);
        let back = partial_trace(&p.to_density(), &[0, 1]).unwrap();
        assert!((back.entries() - diag.entries()).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn haar_determinism_and_norm() {
        let layout = DimsLayout::qubits(3).unwrap();
        let a = haar_random_pure(&layout, &mut ChaCha8Rng::seed_from_u64(42));
        let b = haar_random_pure(&layout, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_density_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pure = random_density(3, 1, &mut rng).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-12);
        assert!(matches!(random_density(2, 3, &mut rng), Err(Error::RankOutOfRange { .. })));
        assert!(random_density(2, 0, &mut rng).is_err());
        let a = random_density(4, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_density(4, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        // a full-rank sample passes public validation
        let full = random_density(4, 4, &mut rng).unwrap();
        DensityMatrix::new(full.entries().clone(), full.layout().clone()).unwrap();
    }

    #[test]
    fn random_qubit_eigenvalues_symmetric_on_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mean_top: f64 = (0..n)
            .map(|_| spectrum(&random_density(2, 2, &mut rng).unwrap()).unwrap().values()[0])
            .sum::<f64>()
            / n as f64;
        let mean_bottom = 1.0 - mean_top;
        // eigenvalues are symmetric about 1/2: their pair-average is exactly 1/2
        assert_abs_diff_eq!((mean_top + mean_bottom) / 2.0, 0.5, epsilon = 1e-12);
        assert!(mean_top > 0.5);
    }

    #[test]
    fn named_states() {
        let ghz = named_state(&NamedState::Ghz(3)).unwrap();
        for p in 0..3 {
            let s = spectrum(&ghz.reduced(&[p]).unwrap()).unwrap();
            assert_abs_diff_eq!(s.values()[0], 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(s.values()[1], 0.5, epsilon = 1e-14);
        }
        assert!(named_state(&NamedState::Ghz(1)).is_err());

        let a = [0.98_f64.sqrt(), 0.01_f64.sqrt(), 0.01_f64.sqrt()];
        let w = named_state(&NamedState::WClass(a.to_vec())).unwrap();
        let expect = [0.02, 0.01, 0.01];
        for (p, e) in expect.iter().enumerate() {
            let s = spectrum(&w.reduced(&[p]).unwrap()).unwrap();
            assert_abs_diff_eq!(s.min(), *e, epsilon = 1e-12);
        }
        assert!(named_state(&NamedState::WClass(vec![1.0, 0.0])).is_err());
        assert!(named_state(&NamedState::WClass(vec![0.5, 0.5])).is_err());
    }

    #[test]
    fn wclass_marginal_equality() {
        for a1sq in [0.5, 0.6, 0.75, 0.9] {
            let rest = (1.0 - a1sq) / 3.0;
            let a = vec![f64::sqrt(a1sq), rest.sqrt(), rest.sqrt(), rest.sqrt()];
            let w = named_state(&NamedState::WClass(a)).unwrap();
            let l: Vec<f64> = (0..4).map(|p| spectrum(&w.reduced(&[p]).unwrap()).unwrap().min()).collect();
            assert_abs_diff_eq!(l[0], l[1] + l[2] + l[3], epsilon = 1e-12);
        }
        // a_1² < 1/2: party 1's smallest eigenvalue is a_1², no longer the sum of the others
        let a = vec![0.3_f64.sqrt(), 0.5_f64.sqrt(), 0.2_f64.sqrt()];
        let w = named_state(&NamedState::WClass(a)).unwrap();
        let l: Vec<f64> = (0..3).map(|p| spectrum(&w.reduced(&[p]).unwrap()).unwrap().min()).collect();
        assert!((l[0] - (l[1] + l[2])).abs() > 1e-3);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(4, 3, &mut rng).unwrap();
        let u = haar_random_unitary(4, &mut rng);
        let v = rho.conjugate(&u).unwrap();
        for (a, b) in spectrum(&rho).unwrap().values().iter().zip(spectrum(&v).unwrap().values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!((&u * u.adjoint() - DMatrix::<Complex64>::identity(4, 4)).iter().all(|z| z.norm() < 1e-12));
    }
}
