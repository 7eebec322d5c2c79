//! Pauli product-basis (Liouville) representation of the composite maps for
//! L = 2: the 16x16 transfer matrices, their analytic block assembly, and
//! the decoherence function computed along four routes of decreasing
//! generality: full transfer-matrix powers, powers of a reduced 4x4 block,
//! a closed form for |+><+| ancillas, and extraction from a sequence of
//! reduced states.
//!
//! The operator basis is e_0 = I/sqrt2, e_1 = sx/sqrt2, e_2 = i sy/sqrt2,
//! e_3 = sz/sqrt2 on each factor, ordered e_k (x) e_l at index 4k + l. With
//! this choice the analytic block entries below reproduce the numerically
//! extracted superoperators exactly; the ancilla coefficients are
//! rho_m = sqrt2 Tr[e_m^dag rho_A], i.e. (1, <sx>, -i<sy>, <sz>).

use crate::maps::{CollisionMap, MapKind};
use crate::model::ModelParams;
use crate::tensor::{kron, matrix_power, pauli, Axis, ComplexMatrix, DensityMatrix};
use crate::{CcmError, Result, C64};

/// Basis element e_k of a single qubit factor.
pub fn basis_element(k: usize) -> ComplexMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match k {
        0 => ComplexMatrix::identity(2).scale(s),
        1 => pauli(Axis::X).scale(s),
        2 => pauli(Axis::Y).scale(C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)),
        3 => pauli(Axis::Z).scale(s),
        _ => panic!("basis index {k} out of range"),
    }
}

/// e_k (x) e_l at flat index 4k + l.
pub fn product_basis_element(k: usize, l: usize) -> ComplexMatrix {
    kron(&basis_element(k), &basis_element(l))
}

pub const fn basis_index(k: usize, l: usize) -> usize {
    4 * k + l
}

/// Hilbert-Schmidt inner product Tr[a^dag b].
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.adjoint().mul(b).trace()
}

/// Which map a transfer matrix represents.
pub use crate::maps::MapKind as TransferKind;

/// 16x16 matrix of a composite map in the ordered Pauli product basis.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub matrix: ComplexMatrix,
    pub kind: MapKind,
    pub params: ModelParams,
}

/// Series of decoherence-function values D(0..=n_max); D(0) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariant {
    /// Ancillas correlated before colliding (the map with memory effects).
    Forward,
    /// Collision before correlation (the always-Markovian comparator).
    Reversed,
}

#[derive(Debug, Clone)]
pub struct DecoherenceSeries {
    values: Vec<C64>,
    variant: SeriesVariant,
}

impl DecoherenceSeries {
    pub fn new(values: Vec<C64>, variant: SeriesVariant) -> Result<Self> {
        if values.is_empty() {
            return Err(CcmError::EmptySeries);
        }
        if (values[0] - C64::new(1.0, 0.0)).norm() != 0.0 {
            return Err(CcmError::InvalidDensity("D(0) must be exactly 1".into()));
        }
        if let Some(bad) = values.iter().find(|v| v.norm() > 1.0 + 1e-12) {
            return Err(CcmError::InvalidDensity(format!("|D(n)| = {} > 1", bad.norm())));
        }
        Ok(Self { values, variant })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn variant(&self) -> SeriesVariant {
        self.variant
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

fn require_builtin_pair(params: &ModelParams, what: &'static str) -> Result<()> {
    if params.correlation_length() != 2 {
        return Err(CcmError::UnsupportedLength(what, params.correlation_length()));
    }
    Ok(())
}

/// Numerically extracts the 16x16 transfer matrix of any L = 2 map:
/// entry (4k+l, 4m+n) = Tr[(e_k (x) e_l)^dag map(e_m (x) e_n)], the map
/// being extended linearly to the non-Hermitian basis operators.
pub fn superop_to_matrix(map: &CollisionMap) -> Result<TransferMatrix> {
    require_builtin_pair(&map.params, "superop_to_matrix")?;
    let mut t = ComplexMatrix::zeros(16, 16);
    for m in 0..4 {
        for n in 0..4 {
            let img = map.apply_linear(&product_basis_element(m, n))?;
            for k in 0..4 {
                for l in 0..4 {
                    t.set(basis_index(k, l), basis_index(m, n), hs_inner(&product_basis_element(k, l), &img));
                }
            }
        }
    }
    Ok(TransferMatrix { matrix: t, kind: map.kind, params: map.params.clone() })
}

/// Ancilla block A1; columns touch only the rho-coefficient column 0 and
/// the sin(2 eps) column 3.
pub fn block_a1(epsilon: f64, rho: &[C64; 4]) -> ComplexMatrix {
    let c = C64::new((2.0 * epsilon).cos(), 0.0);
    let ims = C64::new(0.0, -(2.0 * epsilon).sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, C64::new(1.0, 0.0));
    m.set(1, 0, rho[1] * c);
    m.set(2, 0, rho[2] * c);
    m.set(3, 0, rho[3]);
    m.set(1, 3, ims * rho[2]);
    m.set(2, 3, ims * rho[1]);
    m
}

/// Ancilla block A2, the partner of A1 in the correlate-first transfer
/// matrix.
pub fn block_a2(epsilon: f64, rho: &[C64; 4]) -> ComplexMatrix {
    let c = C64::new((2.0 * epsilon).cos(), 0.0);
    let ims = C64::new(0.0, -(2.0 * epsilon).sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 1, c);
    m.set(0, 2, ims * rho[3]);
    m.set(1, 1, rho[1]);
    m.set(2, 1, rho[2]);
    m.set(3, 1, rho[3] * c);
    m.set(3, 2, ims);
    m
}

/// Off-diagonal block of the collide-first map in the upper (identity/sx)
/// row group.
pub fn block_a2_prime(epsilon: f64, rho: &[C64; 4]) -> ComplexMatrix {
    let ims = C64::new(0.0, -(2.0 * epsilon).sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(1, 2, ims * rho[2]);
    m.set(2, 2, ims * rho[1]);
    m
}

/// Diagonal block of the collide-first map in the lower row group.
pub fn block_b1(epsilon: f64, tau: f64, rho: &[C64; 4]) -> ComplexMatrix {
    let ct = C64::new((2.0 * tau).cos(), 0.0);
    let ce = C64::new((2.0 * epsilon).cos(), 0.0);
    let ims = C64::new(0.0, -(2.0 * epsilon).sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, ct);
    m.set(1, 0, rho[1] * ce * ct);
    m.set(2, 0, rho[2] * ce * ct);
    m.set(3, 0, rho[3] * ct);
    m.set(1, 3, ims * rho[2]);
    m.set(2, 3, ims * rho[1]);
    m
}

/// Off-diagonal block of the collide-first map in the lower row group.
pub fn block_b2(epsilon: f64, rho: &[C64; 4]) -> ComplexMatrix {
    let ce = C64::new((2.0 * epsilon).cos(), 0.0);
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 1, C64::new(1.0, 0.0));
    m.set(1, 1, rho[1] * ce);
    m.set(2, 1, rho[2] * ce);
    m.set(3, 1, rho[3]);
    m
}

fn place_block(t: &mut ComplexMatrix, k: usize, m: usize, b: &ComplexMatrix) {
    for r in 0..4 {
        for c in 0..4 {
            t.set(4 * k + r, 4 * m + c, b.get(r, c));
        }
    }
}

pub(crate) fn build_m_transfer_signed(params: &ModelParams, a2_sign: f64) -> Result<TransferMatrix> {
    require_builtin_pair(params, "build_m_transfer")?;
    let rho = params.ancilla().coefficients();
    let a1 = block_a1(params.epsilon, &rho);
    let a2 = block_a2(params.epsilon, &rho)
        .scale(C64::new(0.0, a2_sign * (2.0 * params.tau).sin()));
    let a1c = a1.scale(C64::new((2.0 * params.tau).cos(), 0.0));
    let mut t = ComplexMatrix::zeros(16, 16);
    place_block(&mut t, 0, 0, &a1);
    place_block(&mut t, 1, 1, &a1);
    place_block(&mut t, 2, 2, &a1c);
    place_block(&mut t, 3, 3, &a1c);
    place_block(&mut t, 2, 3, &a2);
    place_block(&mut t, 3, 2, &a2);
    Ok(TransferMatrix { matrix: t, kind: MapKind::CorrelateFirst, params: params.clone() })
}

/// Analytic assembly of the correlate-first transfer matrix from the A1/A2
/// blocks: diag(A1, A1, cos(2t) A1, cos(2t) A1) plus i sin(2t) A2 coupling
/// the two lower row groups.
pub fn build_m_transfer(params: &ModelParams) -> Result<TransferMatrix> {
    build_m_transfer_signed(params, 1.0)
}

/// Analytic assembly of the collide-first transfer matrix. The diagonal
/// upper blocks are A1 with the sin(2 eps) column scaled by cos(2 tau); the
/// off-diagonal partners carry a factor i sin(2 tau).
pub fn build_mprime_transfer(params: &ModelParams) -> Result<TransferMatrix> {
    require_builtin_pair(params, "build_mprime_transfer")?;
    let rho = params.ancilla().coefficients();
    let ct = C64::new((2.0 * params.tau).cos(), 0.0);
    let ist = C64::new(0.0, (2.0 * params.tau).sin());
    let mut a1_scaled = block_a1(params.epsilon, &rho);
    for r in 0..4 {
        let v = a1_scaled.get(r, 3) * ct;
        a1_scaled.set(r, 3, v);
    }
    let a2p = block_a2_prime(params.epsilon, &rho).scale(ist);
    let b1 = block_b1(params.epsilon, params.tau, &rho);
    let b2 = block_b2(params.epsilon, &rho).scale(ist);
    let mut t = ComplexMatrix::zeros(16, 16);
    place_block(&mut t, 0, 0, &a1_scaled);
    place_block(&mut t, 1, 1, &a1_scaled);
    place_block(&mut t, 0, 1, &a2p);
    place_block(&mut t, 1, 0, &a2p);
    place_block(&mut t, 2, 2, &b1);
    place_block(&mut t, 3, 3, &b1);
    place_block(&mut t, 2, 3, &b2);
    place_block(&mut t, 3, 2, &b2);
    Ok(TransferMatrix { matrix: t, kind: MapKind::CollideFirst, params: params.clone() })
}

/// D(n) as a contraction of transfer-matrix powers:
/// D(n) = sum_m ([M^n]_{30,3m} - [M^n]_{20,3m}) rho_m.
pub fn decoherence_via_transfer(params: &ModelParams, n_max: usize) -> Result<DecoherenceSeries> {
    let t = build_m_transfer(params)?;
    let rho = params.ancilla().coefficients();
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(C64::new(1.0, 0.0));
    let mut power = ComplexMatrix::identity(16);
    for _ in 1..=n_max {
        power = power.mul(&t.matrix);
        let mut d = C64::new(0.0, 0.0);
        for m in 0..4 {
            d += (power.get(basis_index(3, 0), basis_index(3, m))
                - power.get(basis_index(2, 0), basis_index(3, m)))
                * rho[m];
        }
        values.push(d);
    }
    DecoherenceSeries::new(values, SeriesVariant::Forward)
}

/// The 4x4 block whose powers carry the whole decoherence function:
/// cos(2 tau) A1 - i sin(2 tau) A2.
pub fn forward_block(params: &ModelParams) -> Result<ComplexMatrix> {
    require_builtin_pair(params, "forward_block")?;
    let rho = params.ancilla().coefficients();
    let a1 = block_a1(params.epsilon, &rho).scale(C64::new((2.0 * params.tau).cos(), 0.0));
    let a2 = block_a2(params.epsilon, &rho).scale(C64::new(0.0, -(2.0 * params.tau).sin()));
    Ok(a1.add(&a2))
}

/// D(n) from powers of the reduced 4x4 block, contracted against the
/// ancilla coefficients on row zero.
pub fn decoherence_via_block(params: &ModelParams, n_max: usize) -> Result<DecoherenceSeries> {
    let xi = forward_block(params)?;
    let rho = params.ancilla().coefficients();
    let values = contract_block_powers(&xi, &rho, n_max);
    DecoherenceSeries::new(values, SeriesVariant::Forward)
}

fn contract_block_powers(g: &ComplexMatrix, rho: &[C64; 4], n_max: usize) -> Vec<C64> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(C64::new(1.0, 0.0));
    let mut power = ComplexMatrix::identity(4);
    for _ in 1..=n_max {
        power = power.mul(g);
        let mut d = C64::new(0.0, 0.0);
        for m in 0..4 {
            d += power.get(0, m) * rho[m];
        }
        values.push(d);
    }
    values
}

/// Switchover radius around the removable cos(2 eps) = 0 / cos(2 tau) = 0
/// singularities of the closed form, measured on the cosine (about twice
/// the angular distance from pi/4).
const LIMIT_SWITCH: f64 = 2e-9;
/// Below this eigenvalue gap the two closed-form branches merge and the
/// expression degenerates; fall back to exact 2x2 powers.
const DEGENERATE_DELTA: f64 = 1e-6;

/// Closed-form D(n) for |+><+| ancillas:
/// D(n) = zeta_+ z_+^n - zeta_- z_-^n with z_± = (e^{-2i tau} ± Delta)/2 and
/// Delta = sqrt(cos 4tau - i cos 4eps sin 4tau) on the principal branch.
/// The removable singularities at cos 2eps = 0 and cos 2tau = 0 switch to
/// their limit values; a degenerate Delta ~ 0 falls back to matrix powers.
pub fn decoherence_closed_form(epsilon: f64, tau: f64, n: usize) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let c2e = (2.0 * epsilon).cos();
    let c2t = (2.0 * tau).cos();
    if c2e.abs() < LIMIT_SWITCH {
        // limit: cos(2 tau)^n
        return C64::new(c2t.powi(n as i32), 0.0);
    }
    if c2t.abs() < LIMIT_SWITCH {
        // limit: (-i sin 2tau)^n cos(2 eps); sin 2tau = ±1 here
        return C64::new(0.0, -(2.0 * tau).sin()).powu(n as u32) * C64::new(c2e, 0.0);
    }
    let delta = (C64::new((4.0 * tau).cos(), 0.0)
        - C64::new(0.0, (4.0 * epsilon).cos() * (4.0 * tau).sin()))
    .sqrt();
    if delta.norm() < DEGENERATE_DELTA {
        return reduced_two_by_two_power(epsilon, tau, n);
    }
    let e2it = C64::from_polar(1.0, 2.0 * tau);
    let den = C64::new(2.0 * c2e * c2t, 0.0);
    let zeta_p = (C64::new(1.0, 0.0) - (e2it - delta) / den) * (e2it + delta)
        / (delta * C64::new(2.0, 0.0));
    let zeta_m = (C64::new(1.0, 0.0) - (e2it + delta) / den) * (e2it - delta)
        / (delta * C64::new(2.0, 0.0));
    let half = C64::new(0.5, 0.0);
    let z_p = (e2it.conj() + delta) * half;
    let z_m = (e2it.conj() - delta) * half;
    zeta_p * z_p.powu(n as u32) - zeta_m * z_m.powu(n as u32)
}

/// Exact fallback at degenerate Delta: powers of the reduced 2x2 block
/// [[c2t, -i s2t c2e], [c2t c2e, -i s2t]], D(n) = [C^n]_{00} + [C^n]_{01}.
fn reduced_two_by_two_power(epsilon: f64, tau: f64, n: usize) -> C64 {
    let (c2e, c2t, s2t) = ((2.0 * epsilon).cos(), (2.0 * tau).cos(), (2.0 * tau).sin());
    let c = ComplexMatrix::two_by_two(
        C64::new(c2t, 0.0),
        C64::new(0.0, -s2t * c2e),
        C64::new(c2t * c2e, 0.0),
        C64::new(0.0, -s2t),
    );
    let p = matrix_power(&c, n);
    p.get(0, 0) + p.get(0, 1)
}

/// Closed-form series over n = 0..=n_max (|+><+| ancillas).
pub fn decoherence_closed_form_series(
    epsilon: f64,
    tau: f64,
    n_max: usize,
) -> Result<DecoherenceSeries> {
    let values = (0..=n_max).map(|n| decoherence_closed_form(epsilon, tau, n)).collect();
    DecoherenceSeries::new(values, SeriesVariant::Forward)
}

/// The 4x4 block of the collide-first map: B1 - i sin(2 tau) B2.
pub fn reversed_block(params: &ModelParams) -> Result<ComplexMatrix> {
    require_builtin_pair(params, "reversed_block")?;
    let rho = params.ancilla().coefficients();
    let b1 = block_b1(params.epsilon, params.tau, &rho);
    let b2 = block_b2(params.epsilon, &rho).scale(C64::new(0.0, -(2.0 * params.tau).sin()));
    Ok(b1.add(&b2))
}

/// D'(n), the decoherence function of the collide-first dynamics, from
/// powers of B1 - i sin(2 tau) B2.
pub fn decoherence_reversed(params: &ModelParams, n_max: usize) -> Result<DecoherenceSeries> {
    let g = reversed_block(params)?;
    let rho = params.ancilla().coefficients();
    let values = contract_block_powers(&g, &rho, n_max);
    DecoherenceSeries::new(values, SeriesVariant::Reversed)
}

/// Closed-form D'(n) for |+><+| ancillas:
/// e^{-2i tau} (cos 2tau - i sin 2tau cos 2eps)^{n-1} for n >= 1.
pub fn reversed_closed_form(epsilon: f64, tau: f64, n: usize) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let base = C64::new((2.0 * tau).cos(), -(2.0 * tau).sin() * (2.0 * epsilon).cos());
    C64::from_polar(1.0, -2.0 * tau) * base.powu(n as u32 - 1)
}

/// <+|rho|-> in the sigma_x basis.
pub fn coherence_x(rho: &DensityMatrix) -> C64 {
    let m = rho.matrix();
    (m.get(0, 0) + m.get(1, 0) - m.get(0, 1) - m.get(1, 1)) * C64::new(0.5, 0.0)
}

/// Extracts D(n) = <+|rho_S(n)|-> / <+|rho_S(0)|-> from a state sequence.
/// Fails if the initial coherence is too small to divide out; callers then
/// need a different initial state (|0><0| in the z basis works).
pub fn decoherence_from_states(
    states: &[DensityMatrix],
    variant: SeriesVariant,
) -> Result<DecoherenceSeries> {
    if states.is_empty() {
        return Err(CcmError::EmptySeries);
    }
    let z = coherence_x(&states[0]);
    if z.norm() <= 1e-10 {
        return Err(CcmError::CoherenceTooSmall);
    }
    let values = states.iter().map(|s| coherence_x(s) / z).collect();
    DecoherenceSeries::new(values, variant)
}
