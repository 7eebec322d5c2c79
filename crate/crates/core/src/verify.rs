//! Self-verification suites: each one reruns an equivalence that the whole
//! construction rests on (chain oracle vs composite iteration, the swap
//! rewriting, analytic transfer blocks vs numerical extraction, closed forms
//! vs matrix powers, CPTP structure) and reports the worst deviation found.

use crate::liouville::{
    build_m_transfer_signed, build_mprime_transfer, decoherence_closed_form,
    decoherence_reversed, decoherence_via_block, reversed_closed_form, superop_to_matrix,
};
use crate::maps::{cptp_check_map, CollisionMap, MapKind};
use crate::model::{chain_reduced_trajectory, AncillaState, ModelParams};
use crate::tensor::{ComplexMatrix, DensityMatrix};
use crate::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Depth of the chain-oracle comparison (capped by the mixed-state
    /// dimension budget).
    pub n_max: usize,
    pub seed: u64,
    /// Test hook: flips the sign of the A2 block in the analytic transfer
    /// assembly, which must trip the transfer-vs-superop suite.
    pub inject_a2_sign_error: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_max: 6, seed: 0xCC11AD, inject_a2_sign_error: false }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
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

fn random_qubit(rng: &mut impl Rng) -> DensityMatrix {
    loop {
        let (x, y, z): (f64, f64, f64) =
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if x * x + y * y + z * z <= 1.0 {
            return DensityMatrix::qubit_from_bloch(x, y, z).unwrap();
        }
    }
}

fn random_params(rng: &mut impl Rng) -> ModelParams {
    ModelParams::qubit_pair(
        rng.gen_range(0.0..std::f64::consts::PI),
        rng.gen_range(0.0..std::f64::consts::PI),
        random_ancilla(rng),
    )
}

fn random_composite(rng: &mut impl Rng) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(4, 4, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = a.mul(&a.adjoint());
    h.scale(C64::new(1.0, 0.0) / h.trace())
}

/// Composite-map iteration against the full-chain oracle.
fn suite_oracle_vs_ccm(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x01);
    let n = opts.n_max.min(6);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let params = random_params(&mut rng);
        let rho_s = random_qubit(&mut rng);
        let map = CollisionMap::new(MapKind::CorrelateFirst, params.clone())?;
        let ccm = crate::maps::iterate_reduced_trajectory(&map, &rho_s, n)?;
        let oracle = chain_reduced_trajectory(&params, &rho_s, n)?;
        for (a, b) in ccm.iter().zip(&oracle) {
            worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }
    Ok(SuiteReport { name: "theorem1-oracle-vs-ccm", max_deviation: worst, tolerance: 1e-10 })
}

/// Direct map against its swap-equivalent rewriting.
fn suite_swap_equivalence(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x02);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let params = random_params(&mut rng);
        let direct = CollisionMap::new(MapKind::CorrelateFirst, params.clone())?;
        let swapped = CollisionMap::new(MapKind::CorrelateFirstSwapped, params)?;
        let theta = random_composite(&mut rng);
        worst = worst.max(
            direct.apply_linear(&theta)?.max_abs_diff(&swapped.apply_linear(&theta)?),
        );
    }
    Ok(SuiteReport { name: "prop1-swap-equivalence", max_deviation: worst, tolerance: 1e-12 })
}

/// Analytic block assembly against numerically extracted superoperators.
fn suite_transfer_vs_superop(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x03);
    let sign = if opts.inject_a2_sign_error { -1.0 } else { 1.0 };
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let params = random_params(&mut rng);
        let analytic = build_m_transfer_signed(&params, sign)?;
        let extracted = superop_to_matrix(&CollisionMap::new(MapKind::CorrelateFirst, params.clone())?)?;
        worst = worst.max(analytic.matrix.max_abs_diff(&extracted.matrix));

        let analytic_p = build_mprime_transfer(&params)?;
        let extracted_p = superop_to_matrix(&CollisionMap::new(MapKind::CollideFirst, params)?)?;
        worst = worst.max(analytic_p.matrix.max_abs_diff(&extracted_p.matrix));
    }
    Ok(SuiteReport { name: "transfer-vs-superop", max_deviation: worst, tolerance: 1e-12 })
}

/// Closed-form decoherence against reduced-block matrix powers.
fn suite_closed_form(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x04);
    let mut worst: f64 = 0.0;
    for _ in 0..12 {
        let eps = rng.gen_range(0.0..std::f64::consts::PI);
        let tau = rng.gen_range(0.0..std::f64::consts::PI);
        let params = ModelParams::qubit_pair_plus(eps, tau);
        let series = decoherence_via_block(&params, 100)?;
        for (n, v) in series.values().iter().enumerate() {
            worst = worst.max((decoherence_closed_form(eps, tau, n) - v).norm());
        }
    }
    Ok(SuiteReport { name: "closed-form-vs-matrix-power", max_deviation: worst, tolerance: 1e-10 })
}

/// Reversed-order block powers against the rank-one closed form, plus the
/// no-revival property of the reversed dynamics.
fn suite_reversed(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x05);
    let mut worst: f64 = 0.0;
    for _ in 0..12 {
        let eps = rng.gen_range(0.0..std::f64::consts::PI);
        let tau = rng.gen_range(0.0..std::f64::consts::PI);
        let params = ModelParams::qubit_pair_plus(eps, tau);
        let series = decoherence_reversed(&params, 100)?;
        let moduli = series.moduli();
        for (n, v) in series.values().iter().enumerate() {
            worst = worst.max((reversed_closed_form(eps, tau, n) - v).norm());
        }
        for n in 0..moduli.len() - 1 {
            worst = worst.max(moduli[n + 1] - moduli[n]);
        }
    }
    Ok(SuiteReport { name: "reversed-closed-form-vs-blocks", max_deviation: worst, tolerance: 1e-10 })
}

/// Choi positivity of both maps at random parameter points.
fn suite_cptp_positivity(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x06);
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let params = random_params(&mut rng);
        for kind in [MapKind::CorrelateFirst, MapKind::CollideFirst] {
            let report = cptp_check_map(&CollisionMap::new(kind, params.clone())?)?;
            worst = worst.max((-report.min_choi_eigenvalue).max(0.0));
        }
    }
    Ok(SuiteReport { name: "cptp-choi-positivity", max_deviation: worst, tolerance: 1e-10 })
}

/// Trace preservation of both maps over the matrix-unit probe basis.
fn suite_cptp_trace(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x07);
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let params = random_params(&mut rng);
        for kind in [MapKind::CorrelateFirst, MapKind::CollideFirst] {
            let report = cptp_check_map(&CollisionMap::new(kind, params.clone())?)?;
            worst = worst.max(report.max_trace_deviation);
        }
    }
    Ok(SuiteReport { name: "cptp-trace-preservation", max_deviation: worst, tolerance: 1e-12 })
}

/// Runs every suite and collects the reports.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        suite_oracle_vs_ccm(opts)?,
        suite_swap_equivalence(opts)?,
        suite_transfer_vs_superop(opts)?,
        suite_closed_form(opts)?,
        suite_reversed(opts)?,
        suite_cptp_positivity(opts)?,
        suite_cptp_trace(opts)?,
    ])
}
