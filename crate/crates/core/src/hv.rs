//! Classical probability spaces, `±1`-valued response functions, and the
//! conformance checks that tie them to the quantum side.
//!
//! A model is a space `(Ω, μ)` plus a response `f_n(ω)` for every measurement
//! direction `n`. Finite spaces are evaluated exactly; the unit-sphere space
//! used by the Kochen–Specker sign model is evaluated by seeded sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qm::{
    born_probability, direction_operator, spectral_decomposition, DensityOperator, Direction,
    HermitianOp, OutcomeSet, MEMBERSHIP_TOL,
};
use crate::sphere::{splitmix64, SampleStream};

/// Eigenvalues of every `n·σ`, in units of ħ/2.
pub const SPIN_SPECTRUM: [f64; 2] = [1.0, -1.0];

/// Tolerance for exact-mode comparisons.
pub const EXACT_TOL: f64 = 1e-12;

/// Width of statistical acceptance bands, in standard errors.
pub const SIGMA_BAND: f64 = 4.0;

/// `sign(x)` with the tie `sign(0) = +1`.
pub fn sign_with_tie(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn in_spin_spectrum(y: f64) -> bool {
    SPIN_SPECTRUM
        .iter()
        .any(|s| (s - y).abs() <= MEMBERSHIP_TOL)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Finitely many sample points with probability weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteProbabilitySpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl FiniteProbabilitySpace {
    /// Points are labelled `ω1, ω2, …`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let labels = (1..=weights.len()).map(|i| format!("ω{i}")).collect();
        Self::with_labels(labels, weights)
    }

    pub fn with_labels(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "probability space has no points".into(),
            ));
        }
        if labels.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidArgument(format!("invalid point weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidArgument(format!(
                "point weights sum to {total}, not 1"
            )));
        }
        Ok(Self { labels, weights })
    }

    pub fn single_point() -> Self {
        Self::new(vec![1.0]).expect("one point of weight 1")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// The unit sphere with its uniform measure, realized by seeded sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereSampleSpace {
    seed: u64,
}

impl SphereSampleSpace {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, count: u64) -> Result<SampleStream> {
        SampleStream::new(self.seed, count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleSpace {
    Finite(FiniteProbabilitySpace),
    Sphere(SphereSampleSpace),
}

/// A point of Ω as seen by a response function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplePoint {
    /// Index into a finite space.
    Index(usize),
    /// Unit vector of the sphere space.
    Vector([f64; 3]),
}

/// A measurement direction together with its Cartesian unit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementAxis {
    pub direction: Direction,
    pub vector: [f64; 3],
}

impl MeasurementAxis {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            vector: direction.cartesian(),
        }
    }
}

/// Outcome assigned to `(direction, sample point)`, in units of ħ/2.
pub trait Response: Send + Sync {
    fn outcome(&self, axis: &MeasurementAxis, point: SamplePoint) -> f64;
}

impl<F> Response for F
where
    F: Fn(&MeasurementAxis, SamplePoint) -> f64 + Send + Sync,
{
    fn outcome(&self, axis: &MeasurementAxis, point: SamplePoint) -> f64 {
        self(axis, point)
    }
}

/// Shared handle to a response function.
#[derive(Clone)]
pub struct ResponseFunction(Arc<dyn Response>);

impl ResponseFunction {
    pub fn new(response: impl Response + 'static) -> Self {
        Self(Arc::new(response))
    }

    pub fn evaluate(&self, axis: &MeasurementAxis, point: SamplePoint) -> f64 {
        self.0.outcome(axis, point)
    }
}

impl fmt::Debug for ResponseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ResponseFunction(..)")
    }
}

/// Which construction produced a model; used for labelling and for the
/// validation each construction promises.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    /// Sign model on the sphere for the pure state with Bloch vector `m`.
    KochenSpecker { bloch: [f64; 3] },
    /// ω-independent outcomes.
    Deterministic,
    /// Anything else, including file-defined tables.
    Custom,
}

impl ModelKind {
    /// How the model's measure and responses depend on the state.
    pub fn state_dependence(&self) -> &'static str {
        match self {
            ModelKind::KochenSpecker { .. } => {
                "uniform measure on the sphere; state enters through the response via m"
            }
            ModelKind::Deterministic => "state-independent: responses ignore ω and ψ",
            ModelKind::Custom => "user-defined finite space and response table",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HVModel {
    space: SampleSpace,
    response: ResponseFunction,
    label: String,
    kind: ModelKind,
}

impl HVModel {
    pub fn new(
        space: SampleSpace,
        response: ResponseFunction,
        label: impl Into<String>,
        kind: ModelKind,
    ) -> Self {
        Self {
            space,
            response,
            label: label.into(),
            kind,
        }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn response(&self) -> &ResponseFunction {
        &self.response
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Seed of the sampled space; finite spaces report 0.
    pub fn seed(&self) -> u64 {
        match &self.space {
            SampleSpace::Sphere(s) => s.seed(),
            SampleSpace::Finite(_) => 0,
        }
    }

    /// Same model on an independent substream. Finite models are unchanged.
    pub fn reseeded(&self, index: u64) -> HVModel {
        let mut model = self.clone();
        if let SampleSpace::Sphere(s) = &self.space {
            let seed = SampleStream::new(s.seed(), 1)
                .expect("count 1 is valid")
                .substream(index)
                .seed();
            model.space = SampleSpace::Sphere(SphereSampleSpace::new(seed));
        }
        model
    }
}

/// Sign model on the sphere reproducing `E(n) = m·n` for the pure state with
/// unit Bloch vector `m`: `f_n(λ) = sign((m + λ)·n)`, λ uniform.
pub fn ks_model(m: [f64; 3], seed: u64) -> Result<HVModel> {
    let norm = dot(&m, &m).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "sign model needs a unit Bloch vector, got norm {norm}"
        )));
    }
    let response = move |axis: &MeasurementAxis, point: SamplePoint| match point {
        SamplePoint::Vector(lambda) => {
            let shifted = [m[0] + lambda[0], m[1] + lambda[1], m[2] + lambda[2]];
            sign_with_tie(dot(&shifted, &axis.vector))
        }
        SamplePoint::Index(_) => f64::NAN,
    };
    Ok(HVModel::new(
        SampleSpace::Sphere(SphereSampleSpace::new(seed)),
        ResponseFunction::new(response),
        format!("ks(m=[{}, {}, {}])", m[0], m[1], m[2]),
        ModelKind::KochenSpecker { bloch: m },
    ))
}

/// Dispersion-free model: `f_n(ω) = assign(n)` on a one-point space.
///
/// Values outside `{±1}` surface as a spectrum violation when the model is
/// evaluated with [`hv_expectation`].
pub fn deterministic_model<F>(assign: F) -> HVModel
where
    F: Fn(&Direction) -> f64 + Send + Sync + 'static,
{
    let response = move |axis: &MeasurementAxis, _: SamplePoint| assign(&axis.direction);
    HVModel::new(
        SampleSpace::Finite(FiniteProbabilitySpace::single_point()),
        ResponseFunction::new(response),
        "deterministic",
        ModelKind::Deterministic,
    )
}

/// `sign(c³)` with `sign(0) = +1`: +1 on the upper hemisphere.
pub fn hemisphere_assignment(n: &Direction) -> f64 {
    sign_with_tie(n.cartesian()[2])
}

/// A pseudo-random `±1` assignment keyed on the exact bits of `(θ, φ)`.
pub fn random_assignment(seed: u64) -> impl Fn(&Direction) -> f64 + Send + Sync + Clone {
    move |n: &Direction| {
        let h =
            splitmix64(seed ^ splitmix64(n.theta().to_bits()) ^ n.phi().to_bits().rotate_left(17));
        if h & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// One sample point of a file-defined model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomPoint {
    pub point_weight: f64,
    /// Direction index → outcome.
    pub outcomes: BTreeMap<usize, f64>,
}

/// File schema for `--model custom-file`: directions as `[θ, φ]` pairs and
/// one entry per sample point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomModelFile {
    pub directions: Vec<[f64; 2]>,
    pub points: Vec<CustomPoint>,
}

/// Finite model given by an outcome table over listed directions. A query
/// direction takes the outcomes of the nearest listed direction (largest
/// `n·d`, lowest index on ties).
pub fn custom_model(file: &CustomModelFile) -> Result<HVModel> {
    if file.directions.is_empty() {
        return Err(Error::InvalidArgument(
            "custom model lists no directions".into(),
        ));
    }
    let axes: Vec<[f64; 3]> = file
        .directions
        .iter()
        .map(|[t, p]| Direction::new(*t, *p).map(|d| d.cartesian()))
        .collect::<Result<_>>()?;
    let space = FiniteProbabilitySpace::new(file.points.iter().map(|p| p.point_weight).collect())?;
    let mut table = Vec::with_capacity(file.points.len());
    for (i, point) in file.points.iter().enumerate() {
        let mut row = Vec::with_capacity(axes.len());
        for k in 0..axes.len() {
            let y = *point.outcomes.get(&k).ok_or_else(|| {
                Error::InvalidArgument(format!("point {i} has no outcome for direction {k}"))
            })?;
            if !in_spin_spectrum(y) {
                return Err(Error::SpectrumViolation {
                    value: y,
                    spectrum: SPIN_SPECTRUM.to_vec(),
                });
            }
            row.push(y);
        }
        if let Some(extra) = point.outcomes.keys().find(|k| **k >= axes.len()) {
            return Err(Error::InvalidArgument(format!(
                "point {i} refers to unknown direction {extra}"
            )));
        }
        table.push(row);
    }
    let response = move |axis: &MeasurementAxis, point: SamplePoint| {
        let SamplePoint::Index(i) = point else {
            return f64::NAN;
        };
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (k, d) in axes.iter().enumerate() {
            let c = dot(d, &axis.vector);
            if c > best_dot {
                best = k;
                best_dot = c;
            }
        }
        table[i][best]
    };
    Ok(HVModel::new(
        SampleSpace::Finite(space),
        ResponseFunction::new(response),
        "custom-file",
        ModelKind::Custom,
    ))
}

/// How much work an expectation may spend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    /// Weighted sum over a finite space.
    Exact,
    /// Monte-Carlo sample count for the sphere space. Finite spaces are always
    /// summed exactly.
    Samples(u64),
}

/// A (possibly estimated) hidden-variable expectation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Zero in exact mode.
    pub std_error: f64,
    /// `μ(f⁻¹({+1}))`.
    pub plus_fraction: f64,
    /// `None` in exact mode.
    pub samples: Option<u64>,
}

impl Estimate {
    pub fn is_exact(&self) -> bool {
        self.samples.is_none()
    }
}

fn non_finite(value: f64, axis: &MeasurementAxis, what: String) -> Error {
    Error::NumericFailure {
        value,
        location: format!(
            "{what} at direction (theta={}, phi={})",
            axis.direction.theta(),
            axis.direction.phi()
        ),
    }
}

/// `E(n) = ∫ μ(dω) f_n(ω)`.
pub fn hv_expectation(model: &HVModel, n: &Direction, budget: Budget) -> Result<Estimate> {
    let axis = MeasurementAxis::new(*n);
    match &model.space {
        SampleSpace::Finite(space) => {
            let mut mean = 0.0;
            let mut plus = 0.0;
            for (i, w) in space.weights.iter().enumerate() {
                let y = model.response.evaluate(&axis, SamplePoint::Index(i));
                if !y.is_finite() {
                    return Err(non_finite(y, &axis, format!("point {i}")));
                }
                if model.kind == ModelKind::Deterministic && !in_spin_spectrum(y) {
                    return Err(Error::SpectrumViolation {
                        value: y,
                        spectrum: SPIN_SPECTRUM.to_vec(),
                    });
                }
                mean += w * y;
                if (y - 1.0).abs() <= MEMBERSHIP_TOL {
                    plus += w;
                }
            }
            Ok(Estimate {
                mean,
                std_error: 0.0,
                plus_fraction: plus,
                samples: None,
            })
        }
        SampleSpace::Sphere(space) => {
            let Budget::Samples(count) = budget else {
                return Err(Error::InvalidArgument(
                    "a sampled space needs a sample budget".into(),
                ));
            };
            let stream = space.stream(count)?;
            let partials = stream.map_blocks(|lambdas| {
                let mut acc = Moments::default();
                for (k, lambda) in lambdas.iter().enumerate() {
                    let y = model.response.evaluate(&axis, SamplePoint::Vector(*lambda));
                    if !y.is_finite() {
                        acc.bad.get_or_insert((k, y));
                        continue;
                    }
                    acc.sum += y;
                    acc.sum_sq += y * y;
                    if (y - 1.0).abs() <= MEMBERSHIP_TOL {
                        acc.plus += 1;
                    }
                }
                acc
            });
            let mut total = Moments::default();
            for (b, part) in partials.iter().enumerate() {
                if let Some((k, y)) = part.bad {
                    let index = b as u64 * crate::sphere::BLOCK_SIZE + k as u64;
                    return Err(non_finite(y, &axis, format!("sample {index}")));
                }
                total.sum += part.sum;
                total.sum_sq += part.sum_sq;
                total.plus += part.plus;
            }
            let nf = count as f64;
            let mean = total.sum / nf;
            let std_error = if count > 1 {
                let var = ((total.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
                (var / nf).sqrt()
            } else {
                0.0
            };
            Ok(Estimate {
                mean,
                std_error,
                plus_fraction: total.plus as f64 / nf,
                samples: Some(count),
            })
        }
    }
}

#[derive(Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
    plus: u64,
    bad: Option<(usize, f64)>,
}

/// Outcome of a conformance check. Failures are results, not errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub observed: f64,
    pub expected: f64,
    pub deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    /// `|observed − expected| ≤ tolerance`.
    pub fn compare(check: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        let deviation = (observed - expected).abs();
        Self {
            check: check.into(),
            passed: deviation <= tolerance,
            observed,
            expected,
            deviation,
            tolerance,
            violations: None,
            evaluations: None,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Tolerance for comparing an estimated `μ(f⁻¹({+1}))` with a Born probability `p`.
pub fn distribution_tolerance(p: f64, estimate: &Estimate) -> f64 {
    match estimate.samples {
        None => EXACT_TOL,
        Some(n) => SIGMA_BAND * (p * (1.0 - p) / n as f64).max(0.0).sqrt() + EXACT_TOL,
    }
}

/// Compares `μ(f_n⁻¹({+1}))` with the Born probability `Tr[ψ χ_{+1}(n·σ)]`.
pub fn check_distribution_rule(
    model: &HVModel,
    psi: &DensityOperator,
    n: &Direction,
    budget: Budget,
) -> Result<CheckReport> {
    let estimate = hv_expectation(model, n, budget)?;
    let born = born_probability(psi, &direction_operator(n), &OutcomeSet::point(1.0));
    let tolerance = distribution_tolerance(born, &estimate);
    let mut report =
        CheckReport::compare("distribution_rule", estimate.plus_fraction, born, tolerance)
            .with_note(format!(
                "direction theta={} phi={}; model {}",
                n.theta(),
                n.phi(),
                model.label
            ));
    report.evaluations = estimate.samples;
    Ok(report)
}

/// Evaluates the response on `samples` random directions (paired with random
/// λ for the sphere space, or with every point of a finite space) and counts
/// outcomes outside `{+1, −1}`.
pub fn check_spectrum_support(model: &HVModel, samples: u64) -> Result<CheckReport> {
    let base = SampleStream::new(model.seed(), samples)?;
    let directions = base.substream(u64::MAX).unit_vectors();
    let axes: Vec<MeasurementAxis> = directions
        .iter()
        .map(|v| Direction::from_vector(*v).map(MeasurementAxis::new))
        .collect::<Result<_>>()?;
    let (violations, evaluations) = match &model.space {
        SampleSpace::Sphere(_) => {
            let lambdas = base.unit_vectors();
            let bad = axes
                .iter()
                .zip(&lambdas)
                .filter(|(axis, lambda)| {
                    !in_spin_spectrum(model.response.evaluate(axis, SamplePoint::Vector(**lambda)))
                })
                .count() as u64;
            (bad, samples)
        }
        SampleSpace::Finite(space) => {
            let mut bad = 0u64;
            for axis in &axes {
                for i in 0..space.len() {
                    if !in_spin_spectrum(model.response.evaluate(axis, SamplePoint::Index(i))) {
                        bad += 1;
                    }
                }
            }
            (bad, samples * space.len() as u64)
        }
    };
    let mut report = CheckReport::compare(
        "spectrum_support",
        violations as f64 / evaluations as f64,
        0.0,
        0.0,
    )
    .with_note(format!("model {}", model.label));
    report.violations = Some(violations);
    report.evaluations = Some(evaluations);
    Ok(report)
}

/// Points of a finite space mapped to one outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preimage {
    pub outcome: f64,
    pub points: Vec<usize>,
    pub measure: f64,
}

/// `f⁻¹({y})` for each `y` in `outcomes`, matched within [`MEMBERSHIP_TOL`].
/// A point whose value matches no outcome is a spectrum violation.
pub fn preimages(
    space: &FiniteProbabilitySpace,
    f: &[f64],
    outcomes: &[f64],
) -> Result<Vec<Preimage>> {
    if f.len() != space.len() {
        return Err(Error::InvalidArgument(format!(
            "{} outcomes for {} points",
            f.len(),
            space.len()
        )));
    }
    let mut out: Vec<Preimage> = outcomes
        .iter()
        .map(|&y| Preimage {
            outcome: y,
            points: Vec::new(),
            measure: 0.0,
        })
        .collect();
    for (i, (&value, &w)) in f.iter().zip(&space.weights).enumerate() {
        let slot = out
            .iter_mut()
            .find(|p| (p.outcome - value).abs() <= MEMBERSHIP_TOL)
            .ok_or_else(|| Error::SpectrumViolation {
                value,
                spectrum: outcomes.to_vec(),
            })?;
        slot.points.push(i);
        slot.measure += w;
    }
    Ok(out)
}

/// Result of checking `Tr[ψA] = Σ_y μ(f⁻¹({y}))·y = Σ_ω μ(ω) f(ω)` on a finite space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub partition_sum: f64,
    pub point_sum: f64,
    pub rearrangement_deviation: f64,
    pub preimages: Vec<Preimage>,
    pub born: Vec<f64>,
    pub distribution_rule_holds: bool,
    pub trace: f64,
    /// Only decided when the distribution rule holds.
    pub trace_matches: Option<bool>,
    pub passed: bool,
}

impl LemmaCheck {
    pub fn to_check_report(&self) -> CheckReport {
        let mut report = CheckReport::compare(
            "expectation_lemma",
            self.partition_sum,
            self.point_sum,
            EXACT_TOL,
        );
        report.passed = self.passed;
        let note = match self.trace_matches {
            Some(true) => format!("distribution rule holds; Tr[ψA] = {} matches", self.trace),
            Some(false) => format!(
                "distribution rule holds but Tr[ψA] = {} differs",
                self.trace
            ),
            None => format!(
                "distribution rule fails; Tr[ψA] = {} not compared",
                self.trace
            ),
        };
        report.with_note(note)
    }
}

/// Verifies the rearrangement identity behind `Tr[ψA] = E_ψ(A)` and, when the
/// induced distribution matches the Born rule, agreement with `Tr[ψA]`.
pub fn check_expectation_lemma(
    space: &FiniteProbabilitySpace,
    f: &[f64],
    psi: &DensityOperator,
    a: &HermitianOp,
) -> Result<LemmaCheck> {
    let spectrum = spectral_decomposition(a);
    let eigenvalues = spectrum.eigenvalues();
    let preimages = preimages(space, f, &eigenvalues)?;
    let partition_sum: f64 = preimages.iter().map(|p| p.measure * p.outcome).sum();
    let point_sum: f64 = f.iter().zip(&space.weights).map(|(y, w)| w * y).sum();
    let rearrangement_deviation = (partition_sum - point_sum).abs();
    let born: Vec<f64> = eigenvalues
        .iter()
        .map(|&y| born_probability(psi, a, &OutcomeSet::point(y)))
        .collect();
    let distribution_rule_holds = preimages
        .iter()
        .zip(&born)
        .all(|(p, b)| (p.measure - b).abs() <= EXACT_TOL);
    let trace = psi.trace_with(a);
    let trace_matches = distribution_rule_holds.then(|| (partition_sum - trace).abs() <= EXACT_TOL);
    let passed = rearrangement_deviation <= EXACT_TOL && trace_matches != Some(false);
    Ok(LemmaCheck {
        partition_sum,
        point_sum,
        rearrangement_deviation,
        preimages,
        born,
        distribution_rule_holds,
        trace,
        trace_matches,
        passed,
    })
}
