//! The contrast quantity `‖E‖² = ∫ E(n)² dΩ` on both sides, and the report
//! that sets them against each other.
//!
//! Quantum side: `E(n) = Tr[ψ n·σ] = T·n`, so `‖E‖² = (4π/3)·|T|² ≤ 4π/3`
//! inside the Bloch ball. Hidden-variable side: `E(n)` is the μ-average of a
//! `±1` response, so `|E| ≤ 1` pointwise and `‖E‖² ≤ 4π`, with equality for
//! every dispersion-free model.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hv::{
    check_spectrum_support, distribution_tolerance, hv_expectation, Budget, CheckReport, Estimate,
    HVModel, SIGMA_BAND,
};
use crate::qm::{
    born_probability, direction_operator, expectation, DensityOperator, OutcomeSet, PURITY_TOL,
};
use crate::sphere::{integrate, integrate_values, SphericalGrid};
use crate::{HV_BOUND, QUANTUM_BOUND};

/// Agreement required between quadrature and closed forms.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Slack on `|T|² ≤ 1`.
pub const BLOCH_TOL: f64 = 1e-12;

/// Directions used by the spectrum-support part of the report.
const SUPPORT_SAMPLES: u64 = 100_000;

/// `∫ Tr[ψ n·σ]² dΩ` by quadrature.
pub fn quantum_contrast(psi: &DensityOperator, grid: &SphericalGrid) -> Result<f64> {
    integrate(|n| expectation(psi, n).powi(2), grid)
}

/// `(4π/3)·|T|²`, the algebraic reduction of [`quantum_contrast`].
pub fn quantum_contrast_closed_form(psi: &DensityOperator) -> f64 {
    QUANTUM_BOUND * bloch_norm_sq(psi)
}

fn bloch_norm_sq(psi: &DensityOperator) -> f64 {
    psi.bloch_vector().iter().map(|t| t * t).sum()
}

/// Hidden-variable expectation at one grid node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodeEstimate {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HvContrast {
    pub value: f64,
    /// Root-sum-square of the weighted per-node errors of `E²`.
    pub std_error: f64,
    pub exact: bool,
    /// `value ≤ 4π + 4σ`.
    pub within_bound: bool,
    #[serde(skip)]
    pub nodes: Vec<NodeEstimate>,
}

impl HvContrast {
    /// Half-width of the `k`-sigma band.
    pub fn band(&self, k: f64) -> f64 {
        k * self.std_error
    }
}

/// `∫ E_hv(n)² dΩ`. Sampled models draw an independent substream per grid
/// node; the reduction runs in node order.
pub fn hv_contrast(model: &HVModel, grid: &SphericalGrid, budget: Budget) -> Result<HvContrast> {
    let nodes: Vec<NodeEstimate> = grid
        .nodes()
        .par_iter()
        .enumerate()
        .map(|(k, node)| {
            let estimate = hv_expectation(&model.reseeded(k as u64), &node.direction, budget)?;
            Ok(NodeEstimate {
                index: k,
                theta: node.direction.theta(),
                phi: node.direction.phi(),
                weight: node.weight,
                estimate,
            })
        })
        .collect::<Result<_>>()?;
    let squares: Vec<f64> = nodes.iter().map(|n| n.estimate.mean.powi(2)).collect();
    let value = integrate_values(grid, &squares)?;
    // Var(X²) ≈ 4E²s² + 2s⁴ for X ~ N(E, s²)
    let variance: f64 = nodes
        .iter()
        .map(|n| {
            let e = n.estimate.mean;
            let s2 = n.estimate.std_error.powi(2);
            n.weight.powi(2) * (4.0 * e * e * s2 + 2.0 * s2 * s2)
        })
        .sum();
    let std_error = variance.sqrt();
    let exact = nodes.iter().all(|n| n.estimate.is_exact());
    Ok(HvContrast {
        value,
        std_error,
        exact,
        within_bound: value <= HV_BOUND + SIGMA_BAND * std_error + QUADRATURE_TOL,
        nodes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochCheck {
    pub norm_sq: f64,
    pub purity: f64,
    pub within_ball: bool,
    /// `|T|² = 1` within 1e-10.
    pub saturated: bool,
}

impl BlochCheck {
    pub fn to_check_report(&self) -> CheckReport {
        let mut report = CheckReport::compare("bloch_sphere", self.norm_sq, 1.0, 0.0);
        report.passed = self.within_ball;
        report.deviation = (self.norm_sq - 1.0).max(0.0);
        report.tolerance = BLOCH_TOL;
        report.with_note(if self.saturated {
            "saturated: pure state"
        } else {
            "interior: mixed state"
        })
    }
}

pub fn bloch_sphere_check(psi: &DensityOperator) -> BlochCheck {
    let norm_sq = bloch_norm_sq(psi);
    BlochCheck {
        norm_sq,
        purity: psi.purity(),
        within_ball: norm_sq <= 1.0 + BLOCH_TOL,
        saturated: (norm_sq - 1.0).abs() <= PURITY_TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Proposition {
    #[serde(rename = "BSF")]
    BornStatisticalFormula,
    #[serde(rename = "HV")]
    HiddenVariables,
    #[serde(rename = "D")]
    DistributionRule,
    #[serde(rename = "BlochSphere")]
    BlochSphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropositionStatus {
    Satisfied,
    Violated,
    Assumed,
}

impl PropositionStatus {
    fn from_check(passed: bool) -> Self {
        if passed {
            PropositionStatus::Satisfied
        } else {
            PropositionStatus::Violated
        }
    }
}

/// Both contrast values for one state/model pair at one grid node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContrastNode {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
    pub quantum: f64,
    pub hv_mean: f64,
    pub hv_std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContrastReport {
    pub model: String,
    pub model_state_dependence: String,
    pub quantum_value: f64,
    pub quantum_bound: f64,
    pub hv_value: f64,
    pub hv_std_error: f64,
    pub hv_bound: f64,
    pub bloch_norm_sq: f64,
    pub pure_state: bool,
    pub proposition_flags: BTreeMap<Proposition, PropositionStatus>,
    pub quantum_attains_max: bool,
    pub hv_attains_max: bool,
    pub gap_ratio: Option<f64>,
    pub contradiction: bool,
    pub verdict: String,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckReport>,
    #[serde(skip)]
    pub nodes: Vec<ContrastNode>,
}

/// Runs both contrasts and the conformance checks for `(ψ, model)`.
///
/// `contradiction` means the two sides disagree beyond quadrature and
/// `4σ` sampling tolerance, as they must when a pure state meets a
/// dispersion-free model (`4π` vs `4π/3`, ratio 3).
pub fn inconsistency_report(
    psi: &DensityOperator,
    model: &HVModel,
    grid: &SphericalGrid,
    budget: Budget,
) -> Result<ContrastReport> {
    let quantum_value = quantum_contrast(psi, grid)?;
    let hv = hv_contrast(model, grid, budget)?;
    let bloch = bloch_sphere_check(psi);

    let plus = OutcomeSet::point(1.0);
    let minus = OutcomeSet::point(-1.0);
    let mut born_consistent = true;
    let mut worst_born_gap: f64 = 0.0;
    let mut d_failures = 0usize;
    let mut worst_d_gap: f64 = 0.0;
    let mut widest_d_tol: f64 = 0.0;
    let mut nodes = Vec::with_capacity(grid.len());
    for (node, est) in grid.nodes().iter().zip(&hv.nodes) {
        let n = &node.direction;
        let op = direction_operator(n);
        let e = expectation(psi, n);
        let p_plus = born_probability(psi, &op, &plus);
        let p_minus = born_probability(psi, &op, &minus);
        let born_gap = (e - (p_plus - p_minus)).abs();
        worst_born_gap = worst_born_gap.max(born_gap);
        born_consistent &= born_gap <= 1e-12 && (p_plus + p_minus - 1.0).abs() <= 1e-12;

        let d_gap = (est.estimate.plus_fraction - p_plus).abs();
        worst_d_gap = worst_d_gap.max(d_gap);
        let d_tol = distribution_tolerance(p_plus, &est.estimate);
        widest_d_tol = widest_d_tol.max(d_tol);
        if d_gap > d_tol {
            d_failures += 1;
        }
        nodes.push(ContrastNode {
            index: est.index,
            theta: est.theta,
            phi: est.phi,
            weight: est.weight,
            quantum: e,
            hv_mean: est.estimate.mean,
            hv_std_error: est.estimate.std_error,
        });
    }

    let support_budget = match budget {
        Budget::Samples(n) => n.min(SUPPORT_SAMPLES),
        Budget::Exact => 1000,
    };
    let support = check_spectrum_support(model, support_budget)?;

    let mut born_check = CheckReport::compare("born_consistency", worst_born_gap, 0.0, 1e-12);
    born_check.passed = born_consistent;
    born_check.evaluations = Some(grid.len() as u64);
    let mut d_check =
        CheckReport::compare("distribution_rule", worst_d_gap, 0.0, 0.0).with_note(format!(
            "{d_failures} of {} grid directions outside tolerance",
            grid.len()
        ));
    d_check.passed = d_failures == 0;
    d_check.violations = Some(d_failures as u64);
    d_check.evaluations = Some(grid.len() as u64);
    d_check.tolerance = widest_d_tol;
    if !hv.exact {
        d_check = d_check.with_note("per-direction tolerance 4·sqrt(p(1-p)/N)");
    }
    let hv_bound_check = CheckReport::compare("hv_bound", hv.value, HV_BOUND, f64::INFINITY);
    let hv_bound_check = CheckReport {
        passed: hv.within_bound,
        deviation: (hv.value - HV_BOUND).max(0.0),
        tolerance: hv.band(SIGMA_BAND) + QUADRATURE_TOL,
        ..hv_bound_check
    };
    let quantum_bound_check = CheckReport {
        passed: quantum_value <= QUANTUM_BOUND + QUADRATURE_TOL,
        deviation: (quantum_value - QUANTUM_BOUND).max(0.0),
        tolerance: QUADRATURE_TOL,
        ..CheckReport::compare("quantum_bound", quantum_value, QUANTUM_BOUND, 0.0)
    };

    let mut flags = BTreeMap::new();
    flags.insert(
        Proposition::BornStatisticalFormula,
        PropositionStatus::from_check(born_consistent),
    );
    flags.insert(
        Proposition::HiddenVariables,
        PropositionStatus::from_check(support.passed),
    );
    flags.insert(
        Proposition::DistributionRule,
        PropositionStatus::from_check(d_check.passed),
    );
    flags.insert(
        Proposition::BlochSphere,
        PropositionStatus::from_check(bloch.within_ball),
    );

    let hv_tol = hv.band(SIGMA_BAND) + QUADRATURE_TOL;
    let quantum_attains_max = (quantum_value - QUANTUM_BOUND).abs() <= QUADRATURE_TOL;
    let hv_attains_max = (hv.value - HV_BOUND).abs() <= hv_tol;
    let contradiction = (hv.value - quantum_value).abs() > hv_tol;
    let gap_ratio = (quantum_value > QUADRATURE_TOL).then(|| hv.value / quantum_value);
    let ratio_text = gap_ratio.map_or_else(|| "undefined".to_string(), |r| format!("{r:.3}"));
    let verdict = if contradiction {
        format!("propositions jointly inconsistent; gap ratio {ratio_text}")
    } else {
        format!("quantum and hidden-variable contrasts agree; gap ratio {ratio_text}")
    };

    let mut warnings = Vec::new();
    if !bloch.saturated {
        warnings.push(format!(
            "state is not pure (|T|^2 = {}); the contradiction concerns pure states",
            bloch.norm_sq
        ));
    }

    Ok(ContrastReport {
        model: model.label().to_string(),
        model_state_dependence: model.kind().state_dependence().to_string(),
        quantum_value,
        quantum_bound: QUANTUM_BOUND,
        hv_value: hv.value,
        hv_std_error: hv.std_error,
        hv_bound: HV_BOUND,
        bloch_norm_sq: bloch.norm_sq,
        pure_state: bloch.saturated,
        proposition_flags: flags,
        quantum_attains_max,
        hv_attains_max,
        gap_ratio,
        contradiction,
        verdict,
        warnings,
        checks: vec![
            bloch.to_check_report(),
            quantum_bound_check,
            born_check,
            support,
            d_check,
            hv_bound_check,
        ],
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::{deterministic_model, ks_model, random_assignment, FiniteProbabilitySpace};
    use crate::hv::{MeasurementAxis, ModelKind, ResponseFunction, SamplePoint, SampleSpace};
    use crate::sphere::product_gauss_grid;

    #[test]
    fn quantum_contrast_examples() {
        let grid = SphericalGrid::default();
        let pure = DensityOperator::from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert!((quantum_contrast(&pure, &grid).unwrap() - QUANTUM_BOUND).abs() < 1e-10);
        let mixed = DensityOperator::maximally_mixed();
        assert_eq!(quantum_contrast(&mixed, &grid).unwrap(), 0.0);
        let half = DensityOperator::from_bloch([0.0, 0.0, 0.5]).unwrap();
        let q = quantum_contrast(&half, &grid).unwrap();
        assert!((q - 1.047_197_551_196_597_7).abs() < 1e-10);
        assert!((q - quantum_contrast_closed_form(&half)).abs() < 1e-10);
    }

    #[test]
    fn quantum_contrast_is_grid_stable() {
        let psi = DensityOperator::from_bloch([0.3, -0.4, 0.5]).unwrap();
        let values: Vec<f64> = [(3, 8), (8, 16), (16, 32)]
            .iter()
            .map(|&(p, a)| quantum_contrast(&psi, &product_gauss_grid(p, a).unwrap()).unwrap())
            .collect();
        assert!((values[0] - values[1]).abs() < 1e-12);
        assert!((values[1] - values[2]).abs() < 1e-12);
    }

    #[test]
    fn deterministic_models_saturate_exactly() {
        let grid = SphericalGrid::default();
        for seed in 0..3 {
            let hv = hv_contrast(
                &deterministic_model(random_assignment(seed)),
                &grid,
                Budget::Exact,
            )
            .unwrap();
            assert!(hv.exact);
            assert_eq!(hv.std_error, 0.0);
            assert!((hv.value - HV_BOUND).abs() < 1e-12);
            assert!(hv.within_bound);
        }
    }

    #[test]
    fn balanced_finite_model_has_zero_contrast() {
        let model = HVModel::new(
            SampleSpace::Finite(FiniteProbabilitySpace::new(vec![0.5, 0.5]).unwrap()),
            ResponseFunction::new(|_: &MeasurementAxis, p: SamplePoint| {
                if p == SamplePoint::Index(0) {
                    1.0
                } else {
                    -1.0
                }
            }),
            "balanced",
            ModelKind::Custom,
        );
        let hv = hv_contrast(&model, &SphericalGrid::default(), Budget::Exact).unwrap();
        assert_eq!(hv.value, 0.0);
    }

    #[test]
    fn ks_contrast_is_near_quantum_maximum() {
        let grid = product_gauss_grid(3, 8).unwrap();
        let hv = hv_contrast(
            &ks_model([0.0, 0.0, 1.0], 42).unwrap(),
            &grid,
            Budget::Samples(200_000),
        )
        .unwrap();
        assert!(!hv.exact);
        assert!(hv.std_error > 0.0);
        assert!(
            (hv.value - QUANTUM_BOUND).abs() <= 4.0 * hv.std_error + 1e-4,
            "{hv:?}"
        );
    }

    #[test]
    fn bloch_check_examples() {
        let pure = bloch_sphere_check(&DensityOperator::from_bloch([0.0, 0.6, 0.8]).unwrap());
        assert!(pure.saturated && pure.within_ball);
        assert!((pure.norm_sq - 1.0).abs() < 1e-15);
        let mixed = bloch_sphere_check(&DensityOperator::maximally_mixed());
        assert_eq!(mixed.norm_sq, 0.0);
        assert!(mixed.within_ball && !mixed.saturated);
        let partial = bloch_sphere_check(&DensityOperator::from_bloch([0.6, 0.0, 0.0]).unwrap());
        assert!((partial.norm_sq - 0.36).abs() < 1e-15);
        assert!(partial.within_ball && !partial.saturated);
        assert!(partial.to_check_report().passed);
    }

    #[test]
    fn pure_state_against_deterministic_model() {
        let psi = DensityOperator::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let model = deterministic_model(crate::hv::hemisphere_assignment);
        let r =
            inconsistency_report(&psi, &model, &SphericalGrid::default(), Budget::Exact).unwrap();
        assert!(r.contradiction);
        assert!(r.quantum_attains_max && r.hv_attains_max);
        assert!((r.gap_ratio.unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(
            r.verdict,
            "propositions jointly inconsistent; gap ratio 3.000"
        );
        assert_eq!(
            r.proposition_flags[&Proposition::DistributionRule],
            PropositionStatus::Violated
        );
        assert_eq!(
            r.proposition_flags[&Proposition::BlochSphere],
            PropositionStatus::Satisfied
        );
        assert!(r.warnings.is_empty());
        assert_eq!(r.nodes.len(), 128);
    }

    #[test]
    fn mixed_state_against_deterministic_model() {
        let psi = DensityOperator::maximally_mixed();
        let model = deterministic_model(|_| 1.0);
        let r =
            inconsistency_report(&psi, &model, &SphericalGrid::default(), Budget::Exact).unwrap();
        assert_eq!(r.quantum_value, 0.0);
        assert!((r.hv_value - HV_BOUND).abs() < 1e-12);
        assert!(r.gap_ratio.is_none());
        assert!(r.contradiction);
        assert!(r.verdict.ends_with("undefined"));
        assert_eq!(
            r.proposition_flags[&Proposition::DistributionRule],
            PropositionStatus::Violated
        );
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn pure_state_against_ks_model() {
        let m = [0.0, 0.0, 1.0];
        let psi = DensityOperator::from_bloch(m).unwrap();
        let model = ks_model(m, 42).unwrap();
        let grid = product_gauss_grid(3, 8).unwrap();
        let r = inconsistency_report(&psi, &model, &grid, Budget::Samples(200_000)).unwrap();
        assert!(!r.contradiction, "{r:?}");
        assert!(r
            .verdict
            .starts_with("quantum and hidden-variable contrasts agree"));
        for status in r.proposition_flags.values() {
            assert_eq!(*status, PropositionStatus::Satisfied);
        }
        assert!(!r.hv_attains_max);
    }
}
