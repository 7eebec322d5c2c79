//! Composite collision maps: the enlarged Markovian description in which the
//! system plus L-1 carried "memory" ancillas evolve under one iterated CPTP
//! map. Three map constructions are provided: the correlate-then-collide map,
//! its swap-equivalent rewriting, and the collide-then-correlate comparator,
//! together with Choi-matrix CPTP verification.

use crate::model::{ancilla_density, ModelParams};
use crate::tensor::{
    apply_two_site_unitary, hermitian_eigenvalues, kron, partial_trace_raw, ComplexMatrix,
    DensityMatrix, SubsystemLayout,
};
use crate::{CcmError, Result, C64};

/// Which composite map a [`CollisionMap`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Correlate the window (carried block plus fresh ancilla), collide the
    /// system with the oldest carried ancilla, trace that ancilla out.
    CorrelateFirst,
    /// Same map rewritten with explicit swaps: the correlator is followed by
    /// a chain of neighbor swaps, the system collides with the last slot,
    /// and the last slot is traced out.
    CorrelateFirstSwapped,
    /// The reversed-order comparator (L = 2 only): collide first, then
    /// correlate the collided ancilla with a fresh one, trace the collided
    /// ancilla.
    CollideFirst,
}

/// Density matrix of the system plus the L-1 carried ancillas.
#[derive(Debug, Clone)]
pub struct CompositeState {
    state: DensityMatrix,
}

impl CompositeState {
    pub fn new(state: DensityMatrix) -> Self {
        Self { state }
    }

    /// The start of every iteration: rho_S (x) rho_A^(L-1).
    pub fn product(rho_s: &DensityMatrix, params: &ModelParams) -> Result<Self> {
        if rho_s.dim() != 2 {
            return Err(CcmError::DimensionMismatch("system must be a qubit".into()));
        }
        let rho_a = ancilla_density(params.ancilla());
        let mut m = rho_s.matrix().clone();
        for _ in 0..params.correlation_length() - 1 {
            m = kron(&m, rho_a.matrix());
        }
        let layout = SubsystemLayout::qubits(params.correlation_length());
        Ok(Self { state: DensityMatrix::new_unchecked(m, layout) })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Reduced system state (all carried ancillas traced out).
    pub fn reduced_system(&self) -> Result<DensityMatrix> {
        crate::tensor::partial_trace(&self.state, &[0])
    }
}

/// One of the composite collision maps, bound to model parameters.
#[derive(Debug, Clone)]
pub struct CollisionMap {
    pub kind: MapKind,
    pub params: ModelParams,
}

impl CollisionMap {
    pub fn new(kind: MapKind, params: ModelParams) -> Result<Self> {
        if kind == MapKind::CollideFirst && params.correlation_length() != 2 {
            return Err(CcmError::UnsupportedLength(
                "the collide-first map",
                params.correlation_length(),
            ));
        }
        Ok(Self { kind, params })
    }

    /// Input dimension 2^L of the composite space the map acts on.
    pub fn input_dim(&self) -> usize {
        1 << self.params.correlation_length()
    }

    pub fn apply(&self, theta: &CompositeState) -> Result<CompositeState> {
        let out = self.apply_linear(theta.state().matrix())?;
        let layout = theta.state().layout().clone();
        Ok(CompositeState::new(DensityMatrix::new_unchecked(out, layout)))
    }

    /// Linear extension of the map to arbitrary (not necessarily Hermitian)
    /// operators on the composite space; this is what the transfer-matrix
    /// and Choi constructions evaluate.
    pub fn apply_linear(&self, theta: &ComplexMatrix) -> Result<ComplexMatrix> {
        let l = self.params.correlation_length();
        let dim = 1 << l;
        if theta.rows() != dim || theta.cols() != dim {
            return Err(CcmError::DimensionMismatch(format!(
                "composite operator must be {dim}x{dim} for L = {l}"
            )));
        }
        match self.kind {
            MapKind::CorrelateFirst => self.correlate_first(theta),
            MapKind::CorrelateFirstSwapped => self.correlate_first_swapped(theta),
            MapKind::CollideFirst => self.collide_first(theta),
        }
    }

    /// Slots: S, A_1 .. A_{L-1} carried (oldest first), fresh ancilla last.
    /// W correlates slots 1..=L, U couples (S, A_1), A_1 is traced out.
    fn correlate_first(&self, theta: &ComplexMatrix) -> Result<ComplexMatrix> {
        let l = self.params.correlation_length();
        let layout = SubsystemLayout::qubits(l + 1);
        let rho_a = ancilla_density(self.params.ancilla());
        let mut big = kron(theta, rho_a.matrix());
        if let Some(w) = self.params.correlator()? {
            apply_correlator(&mut big, &layout, &w, 1, l)?;
        }
        apply_two_site_unitary(&mut big, &layout, &self.params.sa_unitary(), 0, 1)?;
        let keep: Vec<usize> = std::iter::once(0).chain(2..=l).collect();
        partial_trace_raw(&big, &layout, &keep)
    }

    /// W' = S_{L,L-1} ... S_{2,1} W, then U couples (S, A_L), A_L is traced.
    fn correlate_first_swapped(&self, theta: &ComplexMatrix) -> Result<ComplexMatrix> {
        let l = self.params.correlation_length();
        let layout = SubsystemLayout::qubits(l + 1);
        let rho_a = ancilla_density(self.params.ancilla());
        let mut big = kron(theta, rho_a.matrix());
        if let Some(w) = self.params.correlator()? {
            apply_correlator(&mut big, &layout, &w, 1, l)?;
        }
        for k in 1..l {
            swap_sites_in_place(&mut big, &layout, k, k + 1);
        }
        apply_two_site_unitary(&mut big, &layout, &self.params.sa_unitary(), 0, l)?;
        let keep: Vec<usize> = (0..l).collect();
        partial_trace_raw(&big, &layout, &keep)
    }

    /// U acts on the composite input directly, then a fresh ancilla is
    /// appended, W correlates carried and fresh, and the carried (collided)
    /// ancilla is traced out. L = 2 only.
    fn collide_first(&self, theta: &ComplexMatrix) -> Result<ComplexMatrix> {
        let layout = SubsystemLayout::qubits(3);
        let u = self.params.sa_unitary();
        let collided = u.mul(theta).mul(&u.adjoint());
        let rho_a = ancilla_density(self.params.ancilla());
        let mut big = kron(&collided, rho_a.matrix());
        let w = self.params.correlator()?.expect("L = 2 always has a correlator");
        apply_two_site_unitary(&mut big, &layout, &w, 1, 2)?;
        partial_trace_raw(&big, &layout, &[0, 2])
    }
}

fn apply_correlator(
    state: &mut ComplexMatrix,
    layout: &SubsystemLayout,
    w: &ComplexMatrix,
    first: usize,
    l: usize,
) -> Result<()> {
    if l == 2 {
        apply_two_site_unitary(state, layout, w, first, first + 1)
    } else {
        let left = ComplexMatrix::identity(1 << first);
        let right = ComplexMatrix::identity(layout.total_dim() >> (first + l));
        let full = kron(&kron(&left, w), &right);
        *state = full.mul(state).mul(&full.adjoint());
        Ok(())
    }
}

/// Conjugation by the permutation that swaps two qubit sites.
fn swap_sites_in_place(m: &mut ComplexMatrix, layout: &SubsystemLayout, a: usize, b: usize) {
    let n = layout.total_dim();
    let sa = layout.stride(a);
    let sb = layout.stride(b);
    let swap_idx = |idx: usize| -> usize {
        let da = (idx / sa) % 2;
        let db = (idx / sb) % 2;
        idx - da * sa - db * sb + db * sa + da * sb
    };
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let sr = swap_idx(r);
        for c in 0..n {
            out.set(sr, swap_idx(c), m.get(r, c));
        }
    }
    *m = out;
}

/// theta_n = map^n [rho_S (x) rho_A^(L-1)], reduced to the system.
pub fn iterate_reduced(map: &CollisionMap, rho_s: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    Ok(iterate_reduced_trajectory(map, rho_s, n)?.pop().expect("nonempty"))
}

/// All intermediate reduced states rho_S(0), ..., rho_S(n).
pub fn iterate_reduced_trajectory(
    map: &CollisionMap,
    rho_s: &DensityMatrix,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    let mut theta = CompositeState::product(rho_s, &map.params)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(rho_s.clone());
    for _ in 0..n {
        theta = map.apply(&theta)?;
        out.push(theta.reduced_system()?);
    }
    Ok(out)
}

/// Choi matrix J = (map (x) id)(|Omega><Omega|) of a linear superoperator on
/// a `dim`-dimensional space, with |Omega> the normalized maximally
/// entangled vector. The identity map yields |Omega><Omega| itself.
pub fn choi_matrix(dim: usize, map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<ComplexMatrix> {
    let big = dim * dim;
    let mut j = ComplexMatrix::zeros(big, big);
    let scale = C64::new(1.0 / dim as f64, 0.0);
    for i in 0..dim {
        for k in 0..dim {
            let mut e = ComplexMatrix::zeros(dim, dim);
            e.set(i, k, C64::new(1.0, 0.0));
            let img = map(&e)?;
            // img (x) |i><k|, weighted by 1/dim
            for r in 0..dim {
                for c in 0..dim {
                    let v = img.get(r, c) * scale;
                    if v.norm_sqr() != 0.0 {
                        j.set(r * dim + i, c * dim + k, v);
                    }
                }
            }
        }
    }
    Ok(j)
}

/// Result of a CPTP verification: Choi positivity and trace preservation
/// probed over the full matrix-unit basis.
#[derive(Debug, Clone, Copy)]
pub struct CptpReport {
    pub min_choi_eigenvalue: f64,
    pub max_trace_deviation: f64,
}

impl CptpReport {
    pub fn passes(&self, eig_slack: f64, trace_tol: f64) -> bool {
        self.min_choi_eigenvalue >= -eig_slack && self.max_trace_deviation <= trace_tol
    }
}

/// Runs the Choi-positivity and trace-preservation probes on a superoperator.
pub fn cptp_check(
    dim: usize,
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<CptpReport> {
    let j = choi_matrix(dim, &map)?;
    let min_eig = hermitian_eigenvalues(&j).into_iter().fold(f64::INFINITY, f64::min);
    let mut max_dev: f64 = 0.0;
    for i in 0..dim {
        for k in 0..dim {
            let mut e = ComplexMatrix::zeros(dim, dim);
            e.set(i, k, C64::new(1.0, 0.0));
            let expected = if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            max_dev = max_dev.max((map(&e)?.trace() - expected).norm());
        }
    }
    Ok(CptpReport { min_choi_eigenvalue: min_eig, max_trace_deviation: max_dev })
}

/// Convenience: CPTP report of a [`CollisionMap`].
pub fn cptp_check_map(map: &CollisionMap) -> Result<CptpReport> {
    cptp_check(map.input_dim(), |x| map.apply_linear(x))
}
