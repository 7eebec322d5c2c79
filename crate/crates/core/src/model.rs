//! Physical model layer: ancilla states, the system-ancilla and
//! ancilla-ancilla collision unitaries, the correlated initial chain, the
//! brute-force full-chain evolution that serves as ground truth for every
//! other computation path, and the interacting ancilla-pair state.

use crate::tensor::{
    apply_two_site_to_vector, apply_two_site_unitary, hermitian_eigenvalues, kron,
    partial_trace_raw, pauli_two_body_unitary, Axis, ComplexMatrix, DensityMatrix,
    SubsystemLayout,
};
use crate::{CcmError, Result, C64};

/// Most ancillas the density-matrix chain representation will hold
/// (memory grows as 4^sites).
pub const MIXED_ANCILLA_CAP: usize = 8;
/// Most ancillas the pure state-vector fast path will hold.
pub const PURE_ANCILLA_CAP: usize = 14;

/// Coefficients (rho1, rho2, rho3) of the ancilla density matrix in the
/// Pauli expansion rho_A = (1/2)(I + rho1 sx - i rho2 sy + rho3 sz), i.e.
///
/// ```text
///         1 [ 1 + rho3   rho1 + rho2 ]
/// rho_A = - [                        ]     (sigma_z basis)
///         2 [ rho1 - rho2  1 - rho3  ]
/// ```
///
/// rho1 and rho3 are real; rho2 = -i<sigma_y> is purely imaginary (or zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaState {
    rho1: f64,
    rho2: C64,
    rho3: f64,
}

impl AncillaState {
    pub fn new(rho1: f64, rho2: C64, rho3: f64) -> Result<Self> {
        if rho2.re.abs() > 1e-12 {
            return Err(CcmError::AncillaPositivity(format!(
                "rho2 = {rho2} must be purely imaginary"
            )));
        }
        let norm2 = rho1 * rho1 + rho2.norm_sqr() + rho3 * rho3;
        if norm2 > 1.0 + 1e-12 {
            return Err(CcmError::AncillaPositivity(format!(
                "rho1^2 + |rho2|^2 + rho3^2 = {norm2} > 1"
            )));
        }
        Ok(Self { rho1, rho2, rho3 })
    }

    /// From Bloch-vector expectation values (x, y, z) = (<sx>, <sy>, <sz>).
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(x, C64::new(0.0, -y), z)
    }

    /// |+><+|, the sigma_x eigenstate: rho1 = 1, rho2 = rho3 = 0.
    pub fn plus_state() -> Self {
        Self { rho1: 1.0, rho2: C64::new(0.0, 0.0), rho3: 0.0 }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho1: 0.0, rho2: C64::new(0.0, 0.0), rho3: 0.0 }
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> C64 {
        self.rho2
    }

    pub fn rho3(&self) -> f64 {
        self.rho3
    }

    /// The four expansion coefficients (rho0..rho3) with rho0 fixed to 1.
    pub fn coefficients(&self) -> [C64; 4] {
        [
            C64::new(1.0, 0.0),
            C64::new(self.rho1, 0.0),
            self.rho2,
            C64::new(self.rho3, 0.0),
        ]
    }

    pub fn is_plus_state(&self) -> bool {
        (self.rho1 - 1.0).abs() < 1e-14 && self.rho2.norm() < 1e-14 && self.rho3.abs() < 1e-14
    }
}

/// The 2x2 density matrix of an [`AncillaState`] in the sigma_z basis.
pub fn ancilla_density(a: &AncillaState) -> DensityMatrix {
    let half = C64::new(0.5, 0.0);
    let m = ComplexMatrix::two_by_two(
        half * C64::new(1.0 + a.rho3, 0.0),
        half * (C64::new(a.rho1, 0.0) + a.rho2),
        half * (C64::new(a.rho1, 0.0) - a.rho2),
        half * C64::new(1.0 - a.rho3, 0.0),
    );
    DensityMatrix::new(m, SubsystemLayout::qubits(1)).expect("AncillaState invariants")
}

/// exp(-i tau sx (x) sx), the system-ancilla collision.
pub fn build_sa_unitary(tau: f64) -> ComplexMatrix {
    pauli_two_body_unitary(Axis::X, Axis::X, tau)
}

/// exp(-i epsilon sz (x) sz), the pairwise ancilla-ancilla correlator.
pub fn build_aa_unitary(epsilon: f64) -> ComplexMatrix {
    pauli_two_body_unitary(Axis::Z, Axis::Z, epsilon)
}

/// Interaction phase, entanglement phase, correlation length and ancilla
/// preparation of the model.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub tau: f64,
    pub epsilon: f64,
    correlation_length: usize,
    ancilla: AncillaState,
    custom_correlator: Option<ComplexMatrix>,
}

impl ModelParams {
    /// The all-qubit model with the built-in ZZ pair correlator (L = 2).
    pub fn qubit_pair(epsilon: f64, tau: f64, ancilla: AncillaState) -> Self {
        Self { tau, epsilon, correlation_length: 2, ancilla, custom_correlator: None }
    }

    /// L = 2 with default |+><+| ancillas.
    pub fn qubit_pair_plus(epsilon: f64, tau: f64) -> Self {
        Self::qubit_pair(epsilon, tau, AncillaState::plus_state())
    }

    /// The basic memoryless model (L = 1, no correlator).
    pub fn basic(tau: f64, ancilla: AncillaState) -> Self {
        Self { tau, epsilon: 0.0, correlation_length: 1, ancilla, custom_correlator: None }
    }

    /// A model with an explicit correlator unitary on `length` ancillas.
    pub fn with_correlator(
        tau: f64,
        length: usize,
        correlator: ComplexMatrix,
        ancilla: AncillaState,
    ) -> Result<Self> {
        if length < 2 {
            return Err(CcmError::InvalidLayout("correlator needs length >= 2".into()));
        }
        let dim = 1usize << length;
        if correlator.rows() != dim || correlator.cols() != dim {
            return Err(CcmError::DimensionMismatch(format!(
                "correlator must be {dim}x{dim} for length {length}"
            )));
        }
        let uud = correlator.mul(&correlator.adjoint());
        if !uud.approx_eq(&ComplexMatrix::identity(dim), 1e-10) {
            return Err(CcmError::InvalidDensity("correlator is not unitary".into()));
        }
        Ok(Self { tau, epsilon: 0.0, correlation_length: length, ancilla, custom_correlator: Some(correlator) })
    }

    pub fn correlation_length(&self) -> usize {
        self.correlation_length
    }

    pub fn ancilla(&self) -> &AncillaState {
        &self.ancilla
    }

    /// The correlator unitary on the full L-ancilla window, or `None` for
    /// L = 1.
    pub fn correlator(&self) -> Result<Option<ComplexMatrix>> {
        match (self.correlation_length, &self.custom_correlator) {
            (1, _) => Ok(None),
            (_, Some(w)) => Ok(Some(w.clone())),
            (2, None) => Ok(Some(build_aa_unitary(self.epsilon))),
            (l, None) => Err(CcmError::MissingCorrelator(l)),
        }
    }

    pub fn sa_unitary(&self) -> ComplexMatrix {
        build_sa_unitary(self.tau)
    }
}

/// State of the system plus the whole ancilla chain, with a count of the
/// collisions already applied.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub state: DensityMatrix,
    pub collided: usize,
}

/// The correlated initial chain: n + L - 1 fresh ancillas with the
/// correlator applied to the overlapping windows [1..L], [2..L+1], ...,
/// in ascending window order. No collisions have happened yet.
pub fn build_initial_chain(
    params: &ModelParams,
    rho_s: &DensityMatrix,
    n: usize,
) -> Result<ChainState> {
    if n < 1 {
        return Err(CcmError::InvalidLayout("need at least one collision".into()));
    }
    if rho_s.dim() != 2 {
        return Err(CcmError::DimensionMismatch("system must be a qubit".into()));
    }
    let l = params.correlation_length();
    let n_anc = n + l - 1;
    if n_anc > MIXED_ANCILLA_CAP {
        return Err(CcmError::DimensionBudget(format!(
            "{n_anc} ancillas > cap {MIXED_ANCILLA_CAP}"
        )));
    }
    let layout = SubsystemLayout::qubits(1 + n_anc);
    let rho_a = ancilla_density(params.ancilla());
    let mut state = rho_s.matrix().clone();
    for _ in 0..n_anc {
        state = kron(&state, rho_a.matrix());
    }
    if let Some(w) = params.correlator()? {
        for window in 1..=n_anc.saturating_sub(l - 1) {
            apply_window(&mut state, &layout, &w, window, l)?;
        }
    }
    Ok(ChainState {
        state: DensityMatrix::new_unchecked(state, layout),
        collided: 0,
    })
}

/// Applies the L-site correlator to ancilla slots `first..first+L-1`
/// (slot 0 is the system).
fn apply_window(
    state: &mut ComplexMatrix,
    layout: &SubsystemLayout,
    w: &ComplexMatrix,
    first: usize,
    l: usize,
) -> Result<()> {
    if l == 2 {
        apply_two_site_unitary(state, layout, w, first, first + 1)
    } else {
        // Contiguous block: embed as I (x) W (x) I and conjugate. Only used
        // for the explicit-correlator L >= 3 paths, which stay small.
        let left = ComplexMatrix::identity(1 << first);
        let right = ComplexMatrix::identity(layout.total_dim() >> (first + l));
        let full = kron(&kron(&left, w), &right);
        *state = full.mul(state).mul(&full.adjoint());
        Ok(())
    }
}

/// Reduced system state after `n` collisions, brute force: interleaved
/// application of correlator windows and collisions on the full chain,
/// then a partial trace over every ancilla. Ground truth for all other
/// computation paths.
pub fn chain_reduced_state_oracle(
    params: &ModelParams,
    rho_s: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    Ok(chain_reduced_trajectory(params, rho_s, n)?.pop().expect("nonempty trajectory"))
}

/// The whole oracle trajectory rho_S(0), ..., rho_S(n) in one chain pass.
pub fn chain_reduced_trajectory(
    params: &ModelParams,
    rho_s: &DensityMatrix,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    if rho_s.dim() != 2 {
        return Err(CcmError::DimensionMismatch("system must be a qubit".into()));
    }
    if n == 0 {
        return Ok(vec![rho_s.clone()]);
    }
    let rho_a = ancilla_density(params.ancilla());
    if params.correlation_length() == 2 || params.correlation_length() == 1 {
        if let (Some(psi_s), Some(psi_a)) = (pure_vector(rho_s), pure_vector(&rho_a)) {
            let n_anc = n + params.correlation_length() - 1;
            if n_anc <= PURE_ANCILLA_CAP {
                return pure_trajectory(params, &psi_s, &psi_a, n);
            }
        }
    }
    mixed_trajectory(params, rho_s, n)
}

fn mixed_trajectory(
    params: &ModelParams,
    rho_s: &DensityMatrix,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    let l = params.correlation_length();
    let n_anc = n + l - 1;
    if n_anc > MIXED_ANCILLA_CAP {
        return Err(CcmError::DimensionBudget(format!(
            "{n_anc} ancillas > cap {MIXED_ANCILLA_CAP} (mixed-state path)"
        )));
    }
    let layout = SubsystemLayout::qubits(1 + n_anc);
    let rho_a = ancilla_density(params.ancilla());
    let mut state = rho_s.matrix().clone();
    for _ in 0..n_anc {
        state = kron(&state, rho_a.matrix());
    }
    let w = params.correlator()?;
    let u = params.sa_unitary();
    let qubit = SubsystemLayout::qubits(1);
    let mut out = Vec::with_capacity(n + 1);
    out.push(rho_s.clone());
    for k in 1..=n {
        if let Some(w) = &w {
            apply_window(&mut state, &layout, w, k, l)?;
        }
        apply_two_site_unitary(&mut state, &layout, &u, 0, k)?;
        let reduced = partial_trace_raw(&state, &layout, &[0])?;
        out.push(DensityMatrix::new_unchecked(reduced, qubit.clone()));
    }
    Ok(out)
}

fn pure_trajectory(
    params: &ModelParams,
    psi_s: &[C64; 2],
    psi_a: &[C64; 2],
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    let l = params.correlation_length();
    let n_anc = n + l - 1;
    let layout = SubsystemLayout::qubits(1 + n_anc);
    let dim = layout.total_dim();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    // Product state: amplitude = product of local amplitudes per digit.
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut a = psi_s[(idx >> n_anc) & 1];
        for site in 1..=n_anc {
            a *= psi_a[(idx >> (n_anc - site)) & 1];
        }
        *amp = a;
    }
    let w = params.correlator()?;
    let u = params.sa_unitary();
    let mut out = Vec::with_capacity(n + 1);
    out.push(reduced_system_from_vector(&amps, n_anc));
    for k in 1..=n {
        if let Some(w) = &w {
            apply_two_site_to_vector(&mut amps, &layout, w, k, k + 1)?;
        }
        apply_two_site_to_vector(&mut amps, &layout, &u, 0, k)?;
        out.push(reduced_system_from_vector(&amps, n_anc));
    }
    Ok(out)
}

fn reduced_system_from_vector(amps: &[C64], n_anc: usize) -> DensityMatrix {
    let half = amps.len() / 2;
    let mut m = ComplexMatrix::zeros(2, 2);
    let _ = n_anc;
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for rest in 0..half {
                acc += amps[r * half + rest] * amps[c * half + rest].conj();
            }
            m.set(r, c, acc);
        }
    }
    DensityMatrix::new_unchecked(m, SubsystemLayout::qubits(1))
}

/// Extracts the state vector of a pure qubit density matrix, if pure.
fn pure_vector(rho: &DensityMatrix) -> Option<[C64; 2]> {
    if (rho.purity() - 1.0).abs() > 1e-12 {
        return None;
    }
    let m = rho.matrix();
    // Dominant eigenvector of a rank-one 2x2 Hermitian matrix: any nonzero
    // column, normalized.
    let col = if m.get(0, 0).norm() >= m.get(1, 1).norm() { 0 } else { 1 };
    let v = [m.get(0, col), m.get(1, col)];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    Some([v[0] / norm, v[1] / norm])
}

/// Joint state of the interacting ancilla pair (A_n, A_{n+1}) immediately
/// before A_n collides with the system. Built iteratively: correlate, trace
/// the older ancilla, feed the surviving marginal to the next window.
/// Independent of tau and of the system state by construction.
pub fn pair_state_rho_aa(params: &ModelParams, n: usize) -> Result<DensityMatrix> {
    if params.correlation_length() != 2 {
        return Err(CcmError::UnsupportedLength("pair_state_rho_aa", params.correlation_length()));
    }
    if n < 1 {
        return Err(CcmError::InvalidLayout("pair index n must be >= 1".into()));
    }
    let w = params.correlator()?.expect("L = 2 always has a correlator");
    let rho_a = ancilla_density(params.ancilla());
    let pair_layout = SubsystemLayout::qubits(2);
    let correlate = |sigma: &ComplexMatrix| -> ComplexMatrix {
        let joint = kron(sigma, rho_a.matrix());
        w.mul(&joint).mul(&w.adjoint())
    };
    let mut sigma = rho_a.matrix().clone();
    for _ in 1..n {
        sigma = partial_trace_raw(&correlate(&sigma), &pair_layout, &[1])?;
    }
    Ok(DensityMatrix::new_unchecked(correlate(&sigma), pair_layout))
}

/// Eigenvalue floor of a chain state; used to confirm physicality in tests.
pub fn min_eigenvalue_of(state: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(state.matrix()).into_iter().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{partial_trace, trace_distance};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(42)
    }

    fn random_qubit(rng: &mut impl Rng) -> DensityMatrix {
        loop {
            let (x, y, z): (f64, f64, f64) =
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x * x + y * y + z * z <= 1.0 {
                return DensityMatrix::qubit_from_bloch(x, y, z).unwrap();
            }
        }
    }

    fn random_ancilla(rng: &mut impl Rng) -> AncillaState {
        loop {
            let (x, y, z): (f64, f64, f64) =
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x * x + y * y + z * z <= 1.0 {
                return AncillaState::from_bloch(x, y, z).unwrap();
            }
        }
    }

    #[test]
    fn ancilla_density_special_states() {
        let plus = ancilla_density(&AncillaState::plus_state());
        let half = C64::new(0.5, 0.0);
        let expect = ComplexMatrix::two_by_two(half, half, half, half);
        assert!(plus.matrix().approx_eq(&expect, 0.0));

        let mixed = ancilla_density(&AncillaState::maximally_mixed());
        assert!(mixed.matrix().approx_eq(&ComplexMatrix::identity(2).scale(half), 0.0));

        let up = ancilla_density(&AncillaState::new(0.0, C64::new(0.0, 0.0), 1.0).unwrap());
        let mut zero = ComplexMatrix::zeros(2, 2);
        zero.set(0, 0, C64::new(1.0, 0.0));
        assert!(up.matrix().approx_eq(&zero, 0.0));
    }

    #[test]
    fn ancilla_rejects_unphysical() {
        assert!(AncillaState::new(0.9, C64::new(0.0, 0.5), 0.5).is_err());
        assert!(AncillaState::new(0.3, C64::new(0.2, 0.0), 0.0).is_err());
        // from_bloch round-trips the y component through rho2 = -i y
        let a = AncillaState::from_bloch(0.1, 0.6, -0.2).unwrap();
        assert!((a.rho2() - C64::new(0.0, -0.6)).norm() < 1e-15);
        let d = ancilla_density(&a);
        assert!((d.matrix().get(0, 1) - C64::new(0.05, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn collision_unitaries() {
        assert!(build_sa_unitary(0.0).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let w = build_aa_unitary(PI / 4.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zz = kron(&crate::tensor::pauli(Axis::Z), &crate::tensor::pauli(Axis::Z));
        let expect = ComplexMatrix::identity(4).scale(C64::new(s, 0.0)).sub(&zz.scale(C64::new(0.0, s)));
        assert!(w.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn sa_and_aa_do_not_commute_but_xx_pair_does() {
        let u = build_sa_unitary(0.7);
        let w = build_aa_unitary(0.3);
        let comm = u.mul(&w).sub(&w.mul(&u));
        assert!(comm.max_abs_diff(&ComplexMatrix::zeros(4, 4)) > 1e-3);

        let w_xx = pauli_two_body_unitary(Axis::X, Axis::X, 0.3);
        let comm2 = u.mul(&w_xx).sub(&w_xx.mul(&u));
        assert!(comm2.max_abs_diff(&ComplexMatrix::zeros(4, 4)) < 1e-15);
    }

    #[test]
    fn initial_chain_product_cases() {
        let mut rng = rng();
        let rho_s = random_qubit(&mut rng);
        let anc = random_ancilla(&mut rng);
        // L = 1: no correlator at all
        let chain = build_initial_chain(&ModelParams::basic(0.4, anc), &rho_s, 3).unwrap();
        let mut expect = rho_s.matrix().clone();
        let rho_a = ancilla_density(&anc);
        for _ in 0..3 {
            expect = kron(&expect, rho_a.matrix());
        }
        assert!(chain.state.matrix().approx_eq(&expect, 0.0));
        // epsilon = 0, L = 2: correlator is the identity
        let chain = build_initial_chain(&ModelParams::qubit_pair(0.0, 0.4, anc), &rho_s, 2)
            .unwrap();
        let mut expect = rho_s.matrix().clone();
        for _ in 0..3 {
            expect = kron(&expect, rho_a.matrix());
        }
        assert!(chain.state.matrix().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn initial_chain_pair_amplitudes() {
        // L = 2, n = 1, plus ancillas: the correlated pair in the z basis has
        // amplitudes (e^{-ie}, e^{ie}, e^{ie}, e^{-ie})/2.
        let eps = 0.37;
        let params = ModelParams::qubit_pair_plus(eps, 0.9);
        let rho_s = DensityMatrix::qubit_from_bloch(0.0, 0.0, 1.0).unwrap();
        let chain = build_initial_chain(&params, &rho_s, 1).unwrap();
        let pair = partial_trace(&chain.state, &[1, 2]).unwrap();
        let phases = [
            C64::from_polar(0.5, -eps),
            C64::from_polar(0.5, eps),
            C64::from_polar(0.5, eps),
            C64::from_polar(0.5, -eps),
        ];
        for r in 0..4 {
            for c in 0..4 {
                let expect = phases[r] * phases[c].conj();
                assert!((pair.matrix().get(r, c) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn oracle_tau_zero_is_identity() {
        let mut rng = rng();
        let rho_s = random_qubit(&mut rng);
        let params = ModelParams::qubit_pair(1.1, 0.0, random_ancilla(&mut rng));
        for n in 1..=4 {
            let out = chain_reduced_state_oracle(&params, &rho_s, n).unwrap();
            assert!(out.matrix().approx_eq(rho_s.matrix(), 1e-13));
        }
    }

    #[test]
    fn oracle_uncorrelated_plus_ancilla_rotates_phase() {
        // epsilon = 0, rho_A = |+><+|: each collision multiplies the x-basis
        // coherence by e^{-2i tau}, modulus preserved.
        let tau = 0.23;
        let params = ModelParams::qubit_pair_plus(0.0, tau);
        let rho_s = DensityMatrix::qubit_from_bloch(0.3, 0.4, 0.5).unwrap();
        let states = chain_reduced_trajectory(&params, &rho_s, 5).unwrap();
        let coh = |r: &DensityMatrix| {
            // <+|rho|-> in the sigma_x basis
            let m = r.matrix();
            (m.get(0, 0) + m.get(1, 0) - m.get(0, 1) - m.get(1, 1)) * C64::new(0.5, 0.0)
        };
        let z0 = coh(&states[0]);
        for (n, s) in states.iter().enumerate() {
            let expect = z0 * C64::from_polar(1.0, -2.0 * tau * n as f64);
            assert!((coh(s) - expect).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn oracle_pure_and_mixed_paths_agree() {
        let params = ModelParams::qubit_pair_plus(0.41, 0.77);
        let psi = DensityMatrix::qubit_from_bloch(0.0, 0.0, 1.0).unwrap();
        let fast = chain_reduced_trajectory(&params, &psi, 5).unwrap();
        let slow = mixed_trajectory(&params, &psi, 5).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!(a.matrix().approx_eq(b.matrix(), 1e-12));
        }
    }

    #[test]
    fn oracle_outputs_are_physical() {
        let mut rng = rng();
        for _ in 0..5 {
            let params = ModelParams::qubit_pair(
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..PI),
                random_ancilla(&mut rng),
            );
            let rho_s = random_qubit(&mut rng);
            let out = chain_reduced_state_oracle(&params, &rho_s, 4).unwrap();
            assert!(out.matrix().is_hermitian(1e-12));
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(min_eigenvalue_of(&out) > -1e-10);
        }
    }

    #[test]
    fn oracle_diagonal_fixed_in_x_basis() {
        // Pure dephasing: the sigma_x populations never move.
        let mut rng = rng();
        let params = ModelParams::qubit_pair(0.83, 0.36, random_ancilla(&mut rng));
        let rho_s = random_qubit(&mut rng);
        let states = chain_reduced_trajectory(&params, &rho_s, 5).unwrap();
        let pop_plus = |r: &DensityMatrix| {
            let m = r.matrix();
            (m.get(0, 0) + m.get(0, 1) + m.get(1, 0) + m.get(1, 1)).re * 0.5
        };
        let p0 = pop_plus(&states[0]);
        for s in &states {
            assert!((pop_plus(s) - p0).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_correlator_leaves_dynamics_basic() {
        // An xx correlator commutes with the collision unitary, so the
        // reduced dynamics must equal the uncorrelated L = 1 evolution.
        let mut rng = rng();
        for _ in 0..4 {
            let eps = rng.gen_range(0.0..PI);
            let tau = rng.gen_range(0.0..PI);
            let anc = random_ancilla(&mut rng);
            let rho_s = random_qubit(&mut rng);
            let corr = pauli_two_body_unitary(Axis::X, Axis::X, eps);
            let correlated = ModelParams::with_correlator(tau, 2, corr, anc).unwrap();
            let basic = ModelParams::basic(tau, anc);
            let a = chain_reduced_trajectory(&correlated, &rho_s, 4).unwrap();
            let b = chain_reduced_trajectory(&basic, &rho_s, 4).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(x.matrix().max_abs_diff(y.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn pair_state_matches_full_chain_trace() {
        let params = ModelParams::qubit_pair_plus(0.37, 1.3);
        let rho_s = DensityMatrix::qubit_from_bloch(0.2, -0.1, 0.4).unwrap();
        for n in 1..=5 {
            let pair = pair_state_rho_aa(&params, n).unwrap();
            let chain = build_initial_chain(&params, &rho_s, n).unwrap();
            let from_chain = partial_trace(&chain.state, &[n, n + 1]).unwrap();
            assert!(pair.matrix().approx_eq(from_chain.matrix(), 1e-13), "n = {n}");
        }
    }

    #[test]
    fn pair_state_ignores_tau_and_system() {
        let mut rng = rng();
        let anc = random_ancilla(&mut rng);
        let a = pair_state_rho_aa(&ModelParams::qubit_pair(0.52, 0.11, anc), 3).unwrap();
        let b = pair_state_rho_aa(&ModelParams::qubit_pair(0.52, 2.71, anc), 3).unwrap();
        assert!(a.matrix().approx_eq(b.matrix(), 0.0));
    }

    #[test]
    fn pair_state_uncorrelated_is_product() {
        let params = ModelParams::qubit_pair_plus(0.0, 0.6);
        let pair = pair_state_rho_aa(&params, 2).unwrap();
        let plus = ancilla_density(&AncillaState::plus_state());
        assert!(pair.matrix().approx_eq(&kron(plus.matrix(), plus.matrix()), 1e-14));
    }

    #[test]
    fn dimension_budget_enforced() {
        let params = ModelParams::qubit_pair_plus(0.3, 0.3);
        let rho_s = DensityMatrix::qubit_from_bloch(0.1, 0.1, 0.1).unwrap();
        assert!(matches!(
            build_initial_chain(&params, &rho_s, 20),
            Err(CcmError::DimensionBudget(_))
        ));
        // mixed path falls over the cap; pure path would be fine
        assert!(matches!(
            mixed_trajectory(&params, &rho_s, 12),
            Err(CcmError::DimensionBudget(_))
        ));
    }

    #[test]
    fn oracle_valid_over_parameter_square() {
        let rho_s = DensityMatrix::qubit_from_bloch(0.0, 0.0, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let params =
                    ModelParams::qubit_pair_plus(PI * i as f64 / 3.0, PI * j as f64 / 3.0);
                let out = chain_reduced_state_oracle(&params, &rho_s, 3).unwrap();
                assert!(min_eigenvalue_of(&out) > -1e-10);
                assert!(trace_distance(&out, &rho_s).unwrap() <= 1.0 + 1e-12);
            }
        }
    }
}
