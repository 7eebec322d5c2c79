//! Non-Markovianity and correlation measures: trace-distance dynamics under
//! pure dephasing, the information-backflow measure with its maximization
//! over antipodal state pairs, two-qubit concurrence, von Neumann entropy,
//! quantum mutual information, and the (epsilon, tau) parameter sweeps.

use crate::liouville::{
    decoherence_closed_form_series, decoherence_reversed, decoherence_via_block,
    DecoherenceSeries, SeriesVariant,
};
use crate::model::{pair_state_rho_aa, AncillaState, ModelParams};
use crate::tensor::{
    general_eigenvalues, hermitian_eigenvalues, kron, partial_trace, pauli, Axis, DensityMatrix,
};
use crate::{CcmError, Result, C64};
use rayon::prelude::*;

/// Threshold above which a modulus increase counts as a genuine revival.
pub const REVIVAL_THRESHOLD: f64 = 1e-12;

/// Trace distance between two dephasing qubits with x-basis populations
/// p_i and coherences z_i D(n): sqrt((p1-p2)^2 + |D|^2 |z1-z2|^2).
pub fn trace_distance_qubit(p1: f64, z1: C64, p2: f64, z2: C64, d: C64) -> Result<f64> {
    for (p, z) in [(p1, z1), (p2, z2)] {
        if !(-1e-12..=1.0 + 1e-12).contains(&p) || z.norm_sqr() > p * (1.0 - p) + 1e-12 {
            return Err(CcmError::InvalidBloch(format!("p = {p}, |z|^2 = {}", z.norm_sqr())));
        }
    }
    let dp = p1 - p2;
    let dz = (z1 - z2).norm_sqr();
    Ok((dp * dp + d.norm_sqr() * dz).sqrt())
}

/// Result of the backflow maximization for one decoherence series.
#[derive(Debug, Clone)]
pub struct BlpResult {
    /// The measure: summed trace-distance revivals at the maximizing eta.
    pub value: f64,
    /// Maximizing antipodal-pair parameter in [0, 1].
    pub eta_star: f64,
    /// Collision indices n with |D(n+1)| > |D(n)|.
    pub s_plus: Vec<usize>,
    /// Largest collision index the series covers.
    pub n_max: usize,
}

/// Sums trace-distance revivals over the revival set and maximizes over the
/// antipodal-pair parameter eta: a 1001-point grid scan refined by
/// golden-section search to |d eta| < 1e-10. Depends only on |D(n)|.
pub fn blp_from_series(series: &DecoherenceSeries) -> BlpResult {
    let moduli = series.moduli();
    let n_max = series.n_max();
    let s_plus: Vec<usize> = (0..moduli.len() - 1)
        .filter(|&n| moduli[n + 1] - moduli[n] > REVIVAL_THRESHOLD)
        .collect();
    if s_plus.is_empty() {
        return BlpResult { value: 0.0, eta_star: 0.0, s_plus, n_max };
    }
    let d2: Vec<f64> = moduli.iter().map(|m| m * m).collect();
    let total = |eta: f64| -> f64 {
        s_plus
            .iter()
            .map(|&n| {
                (eta + d2[n + 1] * (1.0 - eta)).sqrt() - (eta + d2[n] * (1.0 - eta)).sqrt()
            })
            .sum()
    };
    const GRID: usize = 1000;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let v = total(i as f64 / GRID as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { 0.0 } else { (best_i - 1) as f64 / GRID as f64 };
    let hi = if best_i == GRID { 1.0 } else { (best_i + 1) as f64 / GRID as f64 };
    let (eta_g, v_g) = golden_section_max(&total, lo, hi, 1e-10);
    if v_g >= best_v {
        BlpResult { value: v_g, eta_star: eta_g, s_plus, n_max }
    } else {
        BlpResult { value: best_v, eta_star: best_i as f64 / GRID as f64, s_plus, n_max }
    }
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// An inclusive, evenly spaced axis; a single step degenerates to `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(CcmError::InvalidAxis("steps must be >= 1".into()));
        }
        if steps > 1 && max <= min {
            return Err(CcmError::InvalidAxis(format!("max {max} must exceed min {min}")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + h * i as f64).collect()
    }
}

/// A rectangular (epsilon, tau) grid of per-cell measure values, stored
/// epsilon-major.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub epsilon_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
    values: Vec<f64>,
}

impl SweepGrid {
    pub fn value_at(&self, i_eps: usize, i_tau: usize) -> f64 {
        self.values[i_eps * self.tau_axis.len() + i_tau]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_cell(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for i in 0..self.epsilon_axis.len() {
            for j in 0..self.tau_axis.len() {
                let v = self.value_at(i, j);
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }
}

/// The decoherence series a sweep cell uses: the closed form on the
/// |+><+| fast path, reduced-block powers otherwise; reversed order always
/// goes through the collide-first block.
pub fn sweep_series(
    epsilon: f64,
    tau: f64,
    n_max: usize,
    variant: SeriesVariant,
    ancilla: &AncillaState,
) -> Result<DecoherenceSeries> {
    match variant {
        SeriesVariant::Forward => {
            if ancilla.is_plus_state() {
                decoherence_closed_form_series(epsilon, tau, n_max)
            } else {
                decoherence_via_block(&ModelParams::qubit_pair(epsilon, tau, *ancilla), n_max)
            }
        }
        SeriesVariant::Reversed => {
            decoherence_reversed(&ModelParams::qubit_pair(epsilon, tau, *ancilla), n_max)
        }
    }
}

/// Evaluates the backflow measure on every grid cell. Cells are independent
/// and evaluated in parallel; the output ordering is deterministic
/// (epsilon-major) regardless of thread count.
pub fn blp_sweep(
    epsilon_axis: &AxisSpec,
    tau_axis: &AxisSpec,
    n_max: usize,
    variant: SeriesVariant,
    ancilla: &AncillaState,
) -> Result<SweepGrid> {
    let eps_values = epsilon_axis.values();
    let tau_values = tau_axis.values();
    let cells: Vec<(usize, usize)> = (0..eps_values.len())
        .flat_map(|i| (0..tau_values.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| {
            let series = sweep_series(eps_values[i], tau_values[j], n_max, variant, ancilla)?;
            Ok(blp_from_series(&series).value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SweepGrid { epsilon_axis: eps_values, tau_axis: tau_values, values })
}

/// Entanglement of a two-qubit state: max{0, l1 - l2 - l3 - l4} over the
/// descending square roots of the spectrum of rho (sy x sy) rho* (sy x sy),
/// the conjugate taken in the z-product basis. Eigenvalue dust (negative or
/// tiny relative to the leading eigenvalue) is clamped to zero before the
/// square root; the spectra here are rank-deficient and the sqrt would
/// otherwise amplify O(1e-16) noise into O(1e-8) errors.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(CcmError::DimensionMismatch("concurrence needs a two-qubit state".into()));
    }
    let yy = kron(&pauli(Axis::Y), &pauli(Axis::Y));
    let flipped = yy.mul(&rho.matrix().conj()).mul(&yy);
    let r = rho.matrix().mul(&flipped);
    let eigs = general_eigenvalues(&r);
    let top = eigs.iter().map(|e| e.re).fold(0.0f64, f64::max);
    if top <= 0.0 {
        return Ok(0.0);
    }
    let mut lambdas: Vec<f64> = eigs
        .iter()
        .map(|e| if e.re < top * 1e-12 { 0.0 } else { e.re.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Von Neumann entropy in bits; eigenvalues below 1e-14 contribute zero.
pub fn von_neumann_entropy_bits(rho: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(rho.matrix())
        .into_iter()
        .filter(|&l| l > 1e-14)
        .map(|l| -l * l.log2())
        .sum()
}

/// Quantum mutual information S(A) + S(B) - S(AB) in bits.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(CcmError::DimensionMismatch("mutual information needs a two-qubit state".into()));
    }
    let a = partial_trace(rho, &[0])?;
    let b = partial_trace(rho, &[1])?;
    Ok(von_neumann_entropy_bits(&a) + von_neumann_entropy_bits(&b)
        - von_neumann_entropy_bits(rho))
}

/// Concurrence and mutual information of one interacting ancilla pair.
#[derive(Debug, Clone, Copy)]
pub struct PairCorrelations {
    pub n: usize,
    pub concurrence: f64,
    pub mutual_info_bits: f64,
}

/// Correlations of the pair (A_n, A_{n+1}) for n = 1..=n_max at fixed
/// entanglement phase, |+><+| ancillas.
pub fn pair_correlation_series(epsilon: f64, n_max: usize) -> Result<Vec<PairCorrelations>> {
    let params = ModelParams::qubit_pair_plus(epsilon, 0.0);
    (1..=n_max)
        .map(|n| {
            let pair = pair_state_rho_aa(&params, n)?;
            Ok(PairCorrelations {
                n,
                concurrence: concurrence_two_qubit(&pair)?,
                mutual_info_bits: mutual_information(&pair)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::decoherence_closed_form;
    use crate::tensor::{trace_distance, ComplexMatrix, SubsystemLayout};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(2024)
    }

    fn bell_state() -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        let h = C64::new(0.5, 0.0);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m.set(r, c, h);
        }
        DensityMatrix::new(m, SubsystemLayout::qubits(2)).unwrap()
    }

    fn random_two_qubit_product(rng: &mut impl Rng) -> DensityMatrix {
        let q = |rng: &mut dyn rand::RngCore| loop {
            let (x, y, z): (f64, f64, f64) =
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x * x + y * y + z * z <= 1.0 {
                return DensityMatrix::qubit_from_bloch(x, y, z).unwrap();
            }
        };
        let a = q(rng);
        let b = q(rng);
        DensityMatrix::new(kron(a.matrix(), b.matrix()), SubsystemLayout::qubits(2)).unwrap()
    }

    fn random_local_unitary(rng: &mut impl Rng) -> ComplexMatrix {
        // exp(-i theta n.sigma) on one qubit
        let theta: f64 = rng.gen_range(0.0..PI);
        let (a, b, c): (f64, f64, f64) =
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let norm = (a * a + b * b + c * c).sqrt().max(1e-9);
        let n = pauli(Axis::X)
            .scale(C64::new(a / norm, 0.0))
            .add(&pauli(Axis::Y).scale(C64::new(b / norm, 0.0)))
            .add(&pauli(Axis::Z).scale(C64::new(c / norm, 0.0)));
        ComplexMatrix::identity(2)
            .scale(C64::new(theta.cos(), 0.0))
            .sub(&n.scale(C64::new(0.0, theta.sin())))
    }

    fn series_from_moduli(moduli: &[f64]) -> DecoherenceSeries {
        let values: Vec<C64> = moduli.iter().map(|&m| C64::new(m, 0.0)).collect();
        DecoherenceSeries::new(values, SeriesVariant::Forward).unwrap()
    }

    #[test]
    fn dephasing_trace_distance_formula() {
        assert!(trace_distance_qubit(0.3, C64::new(0.1, 0.2), 0.3, C64::new(0.1, 0.2), C64::new(0.5, 0.0))
            .unwrap()
            .abs()
            < 1e-15);
        // antipodal pair: p1 - p2 = sqrt(eta), |z1 - z2|^2 = 1 - eta
        let eta = 0.37f64;
        let p1 = 0.5 + 0.5 * eta.sqrt();
        let p2 = 0.5 - 0.5 * eta.sqrt();
        let z = C64::new(0.5 * (1.0 - eta).sqrt(), 0.0);
        let d = C64::new(0.81, -0.1);
        let got = trace_distance_qubit(p1, z, p2, -z, d).unwrap();
        let expect = (eta + d.norm_sqr() * (1.0 - eta)).sqrt();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn dephasing_formula_matches_spectral_trace_distance() {
        let mut rng = rng();
        for _ in 0..20 {
            let p1: f64 = rng.gen_range(0.0..1.0);
            let p2: f64 = rng.gen_range(0.0..1.0);
            let zmag1 = (p1 * (1.0 - p1)).sqrt() * rng.gen_range(0.0..1.0);
            let zmag2 = (p2 * (1.0 - p2)).sqrt() * rng.gen_range(0.0..1.0);
            let z1 = C64::from_polar(zmag1, rng.gen_range(0.0..2.0 * PI));
            let z2 = C64::from_polar(zmag2, rng.gen_range(0.0..2.0 * PI));
            let d = C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI));
            // reconstruct the dephased states in the x basis
            let build = |p: f64, z: C64| {
                let m = ComplexMatrix::two_by_two(
                    C64::new(p, 0.0),
                    d * z,
                    (d * z).conj(),
                    C64::new(1.0 - p, 0.0),
                );
                DensityMatrix::new(m, SubsystemLayout::qubits(1)).unwrap()
            };
            let got = trace_distance_qubit(p1, z1, p2, z2, d).unwrap();
            let oracle = trace_distance(&build(p1, z1), &build(p2, z2)).unwrap();
            assert!((got - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_qubit_rejects_bad_bloch() {
        assert!(trace_distance_qubit(0.1, C64::new(0.9, 0.0), 0.5, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn blp_zero_for_flat_and_monotone() {
        let flat = series_from_moduli(&[1.0; 30]);
        assert_eq!(blp_from_series(&flat).value, 0.0);

        let tau = 0.2 * PI;
        let monotone: Vec<f64> =
            (0..=50).map(|n| (2.0f64 * tau).cos().powi(n).abs()).collect();
        let r = blp_from_series(&series_from_moduli(&monotone));
        assert_eq!(r.value, 0.0);
        assert!(r.s_plus.is_empty());
    }

    #[test]
    fn blp_single_revival_example() {
        let mut m = vec![1.0, 0.5, 0.8];
        m.extend(std::iter::repeat(0.8).take(10));
        let r = blp_from_series(&series_from_moduli(&m));
        assert_eq!(r.s_plus, vec![1]);
        // at eta = 0 the sum is 0.3; the max over eta can only be >= that
        assert!(r.value >= 0.3 - 1e-12);
        assert!((r.value - 0.3).abs() < 1e-9, "max sits at eta = 0 here, value {}", r.value);
        assert!(r.eta_star < 1e-6);
    }

    #[test]
    fn blp_revival_from_zero_prefers_interior_eta() {
        // |D|: 1 -> 0 -> 0.6: at eta = 0 the revival contributes 0.6, but
        // eta > 0 lifts the sqrt near zero faster than it shrinks the gap.
        let m = vec![1.0, 0.0, 0.6];
        let r = blp_from_series(&series_from_moduli(&m));
        let at0: f64 = 0.6;
        assert!(r.value > at0);
        assert!(r.eta_star > 0.0);
    }

    #[test]
    fn blp_is_phase_invariant() {
        let params_eps = 0.195 * PI;
        let tau = 0.15 * PI;
        let plain: Vec<C64> =
            (0..=60).map(|n| decoherence_closed_form(params_eps, tau, n)).collect();
        let rotated: Vec<C64> = plain
            .iter()
            .enumerate()
            .map(|(n, v)| {
                if n == 0 {
                    *v
                } else {
                    v * C64::from_polar(1.0, 1.1 * n as f64)
                }
            })
            .collect();
        let a = blp_from_series(&DecoherenceSeries::new(plain, SeriesVariant::Forward).unwrap());
        let b = blp_from_series(&DecoherenceSeries::new(rotated, SeriesVariant::Forward).unwrap());
        assert!((a.value - b.value).abs() < 1e-12);
        assert!(a.value > 0.05, "this point is well inside the non-Markovian region");
    }

    #[test]
    fn axis_spec_values() {
        let a = AxisSpec::new(0.0, PI, 5).unwrap();
        let v = a.values();
        assert_eq!(v.len(), 5);
        assert!((v[4] - PI).abs() < 1e-15);
        assert_eq!(AxisSpec::new(0.3, 0.3, 1).unwrap().values(), vec![0.3]);
        assert!(AxisSpec::new(0.0, 1.0, 0).is_err());
        assert!(AxisSpec::new(1.0, 0.5, 3).is_err());
    }

    #[test]
    fn sweep_zero_lines_and_reversed_variant() {
        let eps_axis = AxisSpec::new(0.0, PI / 2.0, 9).unwrap();
        let tau_axis = AxisSpec::new(0.0, PI / 2.0, 9).unwrap();
        let plus = AncillaState::plus_state();
        let grid = blp_sweep(&eps_axis, &tau_axis, 60, SeriesVariant::Forward, &plus).unwrap();
        // eps in {0, pi/4, pi/2} are axis indices 0, 4, 8; same for tau
        for j in 0..9 {
            assert!(grid.value_at(0, j) <= 1e-12);
            assert!(grid.value_at(4, j) <= 1e-12);
            assert!(grid.value_at(8, j) <= 1e-12);
            assert!(grid.value_at(j, 0) <= 1e-12);
            assert!(grid.value_at(j, 4) <= 1e-12);
            assert!(grid.value_at(j, 8) <= 1e-12);
        }
        let reversed = blp_sweep(&eps_axis, &tau_axis, 60, SeriesVariant::Reversed, &plus).unwrap();
        assert!(reversed.values().iter().all(|&v| v == 0.0));
        // the forward grid is not all zero
        assert!(grid.values().iter().any(|&v| v > 1e-3));
    }

    #[test]
    fn concurrence_reference_states() {
        let mut rng = rng();
        for _ in 0..5 {
            let prod = random_two_qubit_product(&mut rng);
            assert!(concurrence_two_qubit(&prod).unwrap() < 1e-12);
        }
        assert!((concurrence_two_qubit(&bell_state()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_pair_concurrence_is_sin_2eps() {
        let mut rng = rng();
        for _ in 0..10 {
            let eps: f64 = rng.gen_range(0.0..PI);
            let params = ModelParams::qubit_pair_plus(eps, 0.4);
            let pair = pair_state_rho_aa(&params, 1).unwrap();
            let c = concurrence_two_qubit(&pair).unwrap();
            assert!((c - (2.0 * eps).sin().abs()).abs() < 1e-12, "eps = {eps}");
        }
    }

    #[test]
    fn entropy_and_mutual_information_reference_states() {
        let mut rng = rng();
        let prod = random_two_qubit_product(&mut rng);
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell_state()).unwrap() - 2.0).abs() < 1e-12);
        assert!(von_neumann_entropy_bits(&bell_state()).abs() < 1e-12);

        // pair states at eps in {0, pi/2} are products (the pi/2 correlator
        // is local up to a phase)
        for eps in [0.0, PI / 2.0] {
            let pair = pair_state_rho_aa(&ModelParams::qubit_pair_plus(eps, 0.1), 2).unwrap();
            assert!(mutual_information(&pair).unwrap().abs() < 1e-12, "eps = {eps}");
        }
    }

    #[test]
    fn local_unitaries_leave_measures_invariant() {
        let mut rng = rng();
        let params = ModelParams::qubit_pair_plus(0.195 * PI, 0.0);
        let pair = pair_state_rho_aa(&params, 2).unwrap();
        let c0 = concurrence_two_qubit(&pair).unwrap();
        let m0 = mutual_information(&pair).unwrap();
        for _ in 0..5 {
            let u = kron(&random_local_unitary(&mut rng), &random_local_unitary(&mut rng));
            let rotated = DensityMatrix::new(
                u.mul(pair.matrix()).mul(&u.adjoint()),
                SubsystemLayout::qubits(2),
            )
            .unwrap();
            assert!((concurrence_two_qubit(&rotated).unwrap() - c0).abs() < 1e-10);
            assert!((mutual_information(&rotated).unwrap() - m0).abs() < 1e-10);
        }
    }

    #[test]
    fn pair_series_shape() {
        let series = pair_correlation_series(PI / 4.0, 6).unwrap();
        assert!((series[0].concurrence - 1.0).abs() < 1e-12);
        for pc in &series[1..] {
            assert!(pc.concurrence.abs() < 1e-12);
            assert!((pc.mutual_info_bits - 1.0).abs() < 1e-9);
        }
        // regression fixture: the eps_max slice
        let series = pair_correlation_series(0.195 * PI, 4).unwrap();
        for pc in &series[1..] {
            assert!((pc.concurrence - 0.318711988919).abs() < 1e-9);
            assert!((pc.mutual_info_bits - 0.990481756747).abs() < 1e-9);
        }
        for pc in &series {
            assert!((0.0..=1.0 + 1e-12).contains(&pc.concurrence));
            assert!((-1e-12..=2.0 + 1e-12).contains(&pc.mutual_info_bits));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn blp_depends_only_on_moduli(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut values = vec![C64::new(1.0, 0.0)];
            let mut m: f64 = 1.0;
            for _ in 0..20 {
                m = (m + rng.gen_range(-0.3..0.2)).clamp(0.0, 1.0);
                values.push(C64::from_polar(m, rng.gen_range(0.0..2.0 * PI)));
            }
            let with_phase = DecoherenceSeries::new(values.clone(), SeriesVariant::Forward).unwrap();
            let stripped: Vec<C64> = values.iter().map(|v| C64::new(v.norm(), 0.0)).collect();
            let without = DecoherenceSeries::new(stripped, SeriesVariant::Forward).unwrap();
            let a = blp_from_series(&with_phase);
            let b = blp_from_series(&without);
            prop_assert!((a.value - b.value).abs() < 1e-12);
            prop_assert_eq!(a.s_plus, b.s_plus);
        }
    }
}
