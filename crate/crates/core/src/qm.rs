//! Two-dimensional Hilbert-space machinery.
//!
//! Everything here is exact 2×2 algebra: an operator is stored as a row-major
//! complex matrix, and any Hermitian `A` is handled through its Pauli
//! decomposition `A = a₀·I + r·σ`, which gives eigenvalues `a₀ ± |r|` and
//! spectral projectors `(I ± r̂·σ)/2` in closed form.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major 2×2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Absolute tolerance for Hermiticity, trace and positivity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Absolute tolerance used when deciding whether an eigenvalue lies in an outcome set.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Below this `|r|` an operator `a₀·I + r·σ` is treated as a multiple of the identity.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Tolerance on `|Tr[ψ²] − 1|` for calling a state pure.
pub const PURITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

const PAULI: [Matrix2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
];

fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `Tr[a·b]` without forming the product.
fn trace_product(a: &Matrix2, b: &Matrix2) -> Complex64 {
    a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
}

#[allow(clippy::needless_range_loop)]
fn hermiticity_defect(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    worst
}

fn all_finite(m: &Matrix2) -> bool {
    m.iter()
        .flatten()
        .all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Pauli coefficients `(a₀, r)` of `m = a₀·I + r·σ`, assuming `m` is Hermitian.
fn pauli_decompose(m: &Matrix2) -> (f64, [f64; 3]) {
    let a0 = 0.5 * (m[0][0].re + m[1][1].re);
    let r = [
        0.5 * (m[0][1].re + m[1][0].re),
        0.5 * (m[1][0].im - m[0][1].im),
        0.5 * (m[0][0].re - m[1][1].re),
    ];
    (a0, r)
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A 2×2 complex Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianOp {
    entries: Matrix2,
}

impl HermitianOp {
    /// Validates Hermiticity within [`HERMITIAN_TOL`]. The stored matrix is
    /// symmetrized so downstream algebra sees an exactly Hermitian operator.
    pub fn new(entries: Matrix2) -> Result<Self> {
        if !all_finite(&entries) {
            return Err(Error::InvalidArgument(
                "operator has non-finite entries".into(),
            ));
        }
        let defect = hermiticity_defect(&entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "operator is not Hermitian (defect {defect:e})"
            )));
        }
        let (a0, r) = pauli_decompose(&entries);
        Ok(Self::from_pauli(a0, r))
    }

    /// Builds `a₀·I + r·σ`.
    pub fn from_pauli(a0: f64, r: [f64; 3]) -> Self {
        Self {
            entries: [
                [Complex64::new(a0 + r[2], 0.0), Complex64::new(r[0], -r[1])],
                [Complex64::new(r[0], r[1]), Complex64::new(a0 - r[2], 0.0)],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::from_pauli(1.0, [0.0; 3])
    }

    pub fn zero() -> Self {
        Self::from_pauli(0.0, [0.0; 3])
    }

    pub fn entries(&self) -> &Matrix2 {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    /// Coefficients `(a₀, r)` with `self = a₀·I + r·σ`.
    pub fn pauli_components(&self) -> (f64, [f64; 3]) {
        pauli_decompose(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    /// Plain matrix product; the result is Hermitian only when the factors commute.
    pub fn matmul(&self, other: &HermitianOp) -> Matrix2 {
        matmul(&self.entries, &other.entries)
    }

    pub fn squared(&self) -> HermitianOp {
        let (a0, r) = self.pauli_components();
        // (a₀ + r·σ)² = (a₀² + |r|²) I + 2a₀ r·σ
        let rr = r.iter().map(|x| x * x).sum::<f64>();
        Self::from_pauli(a0 * a0 + rr, r.map(|x| 2.0 * a0 * x))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &HermitianOp) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &HermitianOp, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Eigenvalues in descending order, repeated when degenerate.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (a0, r) = self.pauli_components();
        let len = norm3(&r);
        [a0 + len, a0 - len]
    }
}

impl Add for HermitianOp {
    type Output = HermitianOp;

    fn add(self, rhs: HermitianOp) -> HermitianOp {
        let (a, r) = self.pauli_components();
        let (b, s) = rhs.pauli_components();
        HermitianOp::from_pauli(a + b, [r[0] + s[0], r[1] + s[1], r[2] + s[2]])
    }
}

impl Sub for HermitianOp {
    type Output = HermitianOp;

    fn sub(self, rhs: HermitianOp) -> HermitianOp {
        self + rhs * -1.0
    }
}

impl Mul<f64> for HermitianOp {
    type Output = HermitianOp;

    fn mul(self, rhs: f64) -> HermitianOp {
        let (a, r) = self.pauli_components();
        HermitianOp::from_pauli(a * rhs, r.map(|x| x * rhs))
    }
}

/// A spin-1/2 density operator: Hermitian, positive, unit trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOp,
}

impl DensityOperator {
    pub fn new(entries: Matrix2) -> Result<Self> {
        let op = HermitianOp::new(entries)?;
        let trace = op.trace();
        if (trace - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "density operator trace {trace} differs from 1"
            )));
        }
        let [_, low] = op.eigenvalues();
        if low < -HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "density operator has negative eigenvalue {low}"
            )));
        }
        Ok(Self { op })
    }

    /// `(I + r·σ)/2`; rejects `|r| > 1 + 1e-12`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "bloch vector has non-finite components".into(),
            ));
        }
        let norm = norm3(&r);
        if norm > 1.0 + HERMITIAN_TOL {
            return Err(Error::BlochViolation { norm });
        }
        Ok(Self {
            op: HermitianOp::from_pauli(0.5, r.map(|x| 0.5 * x)),
        })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            op: HermitianOp::from_pauli(0.5, [0.0; 3]),
        }
    }

    pub fn as_operator(&self) -> &HermitianOp {
        &self.op
    }

    pub fn entries(&self) -> &Matrix2 {
        self.op.entries()
    }

    /// `(T₁, T₂, T₃)` with `Tᵢ = Tr[ψ σᵢ]`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let m = self.op.entries();
        [0, 1, 2].map(|i| trace_product(m, &PAULI[i]).re)
    }

    /// `Tr[ψ²]`.
    pub fn purity(&self) -> f64 {
        let m = self.op.entries();
        trace_product(m, m).re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOL
    }

    /// `Re Tr[ψ A]`; the imaginary part vanishes for Hermitian `A`.
    pub fn trace_with(&self, a: &HermitianOp) -> f64 {
        trace_product(self.op.entries(), a.entries()).re
    }
}

/// A measurement direction on the unit sphere in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "polar angle {theta} outside [0, π]"
            )));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidArgument(format!(
                "azimuthal angle {phi} outside [0, 2π)"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot take the direction of {v:?}"
            )));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let mut phi = v[1].atan2(v[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(c¹, c², c³) = (sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// One eigenvalue together with its spectral projector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub eigenvalue: f64,
    pub projector: HermitianOp,
}

/// Spectral decomposition `A = Σ y·P_y`, eigenvalues descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    points: Vec<SpectralPoint>,
}

impl Spectrum {
    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eigenvalue).collect()
    }

    /// The eigenvalue within [`MEMBERSHIP_TOL`] of `y`, if any.
    pub fn matching(&self, y: f64) -> Option<&SpectralPoint> {
        self.points
            .iter()
            .find(|p| (p.eigenvalue - y).abs() <= MEMBERSHIP_TOL)
    }

    /// `Σ y·P_y`.
    pub fn reconstruct(&self) -> HermitianOp {
        self.points.iter().fold(HermitianOp::zero(), |acc, p| {
            acc + p.projector * p.eigenvalue
        })
    }

    /// `χ_Δ(A) = Σ_{y ∈ S_A ∩ Δ} P_y`.
    pub fn characteristic(&self, delta: &OutcomeSet) -> HermitianOp {
        self.points
            .iter()
            .filter(|p| delta.contains(p.eigenvalue))
            .fold(HermitianOp::zero(), |acc, p| acc + p.projector)
    }
}

/// A Borel set of outcomes, restricted to what the checks need.
#[derive(Clone, Debug, PartialEq)]
pub enum OutcomeSet {
    /// Finite set of real points, matched with [`MEMBERSHIP_TOL`].
    Points(Vec<f64>),
    /// Closed interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
}

impl OutcomeSet {
    pub fn point(y: f64) -> Self {
        OutcomeSet::Points(vec![y])
    }

    pub fn contains(&self, y: f64) -> bool {
        match self {
            OutcomeSet::Points(points) => points.iter().any(|p| (p - y).abs() <= MEMBERSHIP_TOL),
            OutcomeSet::Interval { lo, hi } => y >= lo - MEMBERSHIP_TOL && y <= hi + MEMBERSHIP_TOL,
        }
    }
}

/// The Pauli operator for axis 1 (x), 2 (y) or 3 (z).
pub fn pauli(axis_index: usize) -> Result<HermitianOp> {
    match axis_index {
        1..=3 => Ok(HermitianOp {
            entries: PAULI[axis_index - 1],
        }),
        _ => Err(Error::InvalidArgument(format!(
            "pauli axis index {axis_index} not in 1..=3"
        ))),
    }
}

/// `n·σ = sinθcosφ σ_x + sinθsinφ σ_y + cosθ σ_z`.
pub fn direction_operator(n: &Direction) -> HermitianOp {
    HermitianOp::from_pauli(0.0, n.cartesian())
}

/// Closed-form spectral decomposition. A degenerate operator (a multiple of
/// the identity) yields a single point with the rank-2 projector `I`.
///
/// Non-Hermitian matrices are rejected when the [`HermitianOp`] is built.
pub fn spectral_decomposition(a: &HermitianOp) -> Spectrum {
    let (a0, r) = a.pauli_components();
    let len = norm3(&r);
    if len <= DEGENERACY_TOL {
        return Spectrum {
            points: vec![SpectralPoint {
                eigenvalue: a0,
                projector: HermitianOp::identity(),
            }],
        };
    }
    let unit = r.map(|x| x / len);
    let plus = HermitianOp::from_pauli(0.5, unit.map(|x| 0.5 * x));
    let minus = HermitianOp::from_pauli(0.5, unit.map(|x| -0.5 * x));
    Spectrum {
        points: vec![
            SpectralPoint {
                eigenvalue: a0 + len,
                projector: plus,
            },
            SpectralPoint {
                eigenvalue: a0 - len,
                projector: minus,
            },
        ],
    }
}

/// Born probability `Tr[ψ χ_Δ(A)]`, clamped to `[0, 1]` against rounding.
pub fn born_probability(psi: &DensityOperator, a: &HermitianOp, delta: &OutcomeSet) -> f64 {
    let chi = spectral_decomposition(a).characteristic(delta);
    psi.trace_with(&chi).clamp(0.0, 1.0)
}

/// Quantum expectation `Tr[ψ n·σ]`.
pub fn expectation(psi: &DensityOperator, n: &Direction) -> f64 {
    psi.trace_with(&direction_operator(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn diag(a: f64, b: f64) -> HermitianOp {
        HermitianOp::new([
            [Complex64::new(a, 0.0), ZERO],
            [ZERO, Complex64::new(b, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn pauli_z_is_diagonal() {
        assert_eq!(pauli(3).unwrap(), diag(1.0, -1.0));
    }

    #[test]
    fn pauli_algebra() {
        for axis in 1..=3 {
            let s = pauli(axis).unwrap();
            assert_eq!(s.trace(), 0.0);
            assert!(s.squared().approx_eq(&HermitianOp::identity(), 0.0));
            let full = s.matmul(&s);
            assert_eq!(full[0][0], ONE);
            assert_eq!(full[0][1], ZERO);
        }
        assert_eq!(pauli(2).unwrap().trace(), 0.0);
    }

    #[test]
    fn pauli_rejects_bad_axis() {
        assert!(matches!(pauli(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(pauli(4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn direction_operator_on_axes() {
        let z = direction_operator(&Direction::new(0.0, 0.0).unwrap());
        assert!(z.approx_eq(&pauli(3).unwrap(), 1e-15));
        let x = direction_operator(&Direction::new(FRAC_PI_2, 0.0).unwrap());
        assert!(x.approx_eq(&pauli(1).unwrap(), 1e-15));
        let y = direction_operator(&Direction::new(FRAC_PI_2, FRAC_PI_2).unwrap());
        assert!(y.approx_eq(&pauli(2).unwrap(), 1e-15));
    }

    #[test]
    fn direction_rejects_out_of_range_angles() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(PI + 1e-9, 0.0).is_err());
        assert!(Direction::new(0.0, TAU).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        assert!(Direction::from_vector([0.0; 3]).is_err());
    }

    #[test]
    fn direction_from_vector_round_trips() {
        let d = Direction::new(1.1, 4.0).unwrap();
        let back = Direction::from_vector(d.cartesian()).unwrap();
        assert!(close(back.theta(), d.theta(), 1e-14));
        assert!(close(back.phi(), d.phi(), 1e-14));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(
            HermitianOp::new(m),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn state_from_bloch_examples() {
        let up = DensityOperator::from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert!(up.as_operator().approx_eq(&diag(1.0, 0.0), 0.0));
        let mixed = DensityOperator::from_bloch([0.0; 3]).unwrap();
        assert!(mixed.as_operator().approx_eq(&diag(0.5, 0.5), 0.0));
        assert_eq!(mixed, DensityOperator::maximally_mixed());
        match DensityOperator::from_bloch([0.0, 0.0, 2.0]) {
            Err(Error::BlochViolation { norm }) => assert_eq!(norm, 2.0),
            other => panic!("expected bloch violation, got {other:?}"),
        }
    }

    #[test]
    fn bloch_vector_round_trips() {
        assert_eq!(DensityOperator::maximally_mixed().bloch_vector(), [0.0; 3]);
        for r in [[0.0, 0.0, 1.0], [0.3, 0.4, 0.0], [-0.2, 0.5, 0.7]] {
            let t = DensityOperator::from_bloch(r).unwrap().bloch_vector();
            for i in 0..3 {
                assert!(close(t[i], r[i], 1e-12), "{t:?} vs {r:?}");
            }
        }
    }

    #[test]
    fn density_operator_validation() {
        let half = Complex64::new(0.5, 0.0);
        assert!(DensityOperator::new([[half, ZERO], [ZERO, half]]).is_ok());
        // trace 2
        assert!(DensityOperator::new([[ONE, ZERO], [ZERO, ONE]]).is_err());
        // eigenvalues 1.5, -0.5
        assert!(DensityOperator::new([[half, ONE], [ONE, half]]).is_err());
    }

    #[test]
    fn spectral_decomposition_of_sigma_z() {
        let spec = spectral_decomposition(&pauli(3).unwrap());
        assert_eq!(spec.eigenvalues(), vec![1.0, -1.0]);
        assert!(spec.points()[0].projector.approx_eq(&diag(1.0, 0.0), 1e-15));
        assert!(spec.points()[1].projector.approx_eq(&diag(0.0, 1.0), 1e-15));
    }

    #[test]
    fn degenerate_spectrum_collapses() {
        let spec = spectral_decomposition(&HermitianOp::identity());
        assert_eq!(spec.eigenvalues(), vec![1.0]);
        assert_eq!(spec.points()[0].projector, HermitianOp::identity());
        let scaled = spectral_decomposition(&(HermitianOp::identity() * -2.5));
        assert_eq!(scaled.eigenvalues(), vec![-2.5]);
    }

    #[test]
    fn general_operator_reconstructs() {
        let a = HermitianOp::from_pauli(0.7, [0.1, -1.3, 0.4]);
        let spec = spectral_decomposition(&a);
        assert!(spec.reconstruct().approx_eq(&a, 1e-12));
        let [hi, lo] = a.eigenvalues();
        assert!(hi > lo);
        assert_eq!(spec.eigenvalues(), vec![hi, lo]);
    }

    #[test]
    fn born_probability_examples() {
        let up = DensityOperator::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let sz = pauli(3).unwrap();
        let sx = pauli(1).unwrap();
        let plus = OutcomeSet::point(1.0);
        assert_eq!(born_probability(&up, &sz, &plus), 1.0);
        assert!(close(
            born_probability(&DensityOperator::maximally_mixed(), &sx, &plus),
            0.5,
            1e-15
        ));
        // m·n = 0 ⇒ (1 + m·n)/2; cross-check with the explicit projector trace
        let p = born_probability(&up, &sx, &plus);
        let proj = HermitianOp::from_pauli(0.5, [0.5, 0.0, 0.0]);
        assert!(close(p, 0.5, 1e-15));
        assert!(close(p, up.trace_with(&proj), 1e-15));
    }

    #[test]
    fn born_probability_disjoint_and_interval() {
        let psi = DensityOperator::from_bloch([0.1, 0.2, 0.3]).unwrap();
        let sy = pauli(2).unwrap();
        assert_eq!(born_probability(&psi, &sy, &OutcomeSet::point(0.5)), 0.0);
        assert_eq!(
            born_probability(&psi, &sy, &OutcomeSet::Points(vec![])),
            0.0
        );
        let all = OutcomeSet::Interval { lo: -2.0, hi: 2.0 };
        assert!(close(born_probability(&psi, &sy, &all), 1.0, 1e-15));
        let upper = OutcomeSet::Interval { lo: 0.0, hi: 2.0 };
        assert!(close(born_probability(&psi, &sy, &upper), 0.6, 1e-15));
    }

    #[test]
    fn expectation_examples() {
        let mixed = DensityOperator::maximally_mixed();
        let n = Direction::new(0.4, 2.0).unwrap();
        assert_eq!(expectation(&mixed, &n), 0.0);
        let half = DensityOperator::from_bloch([0.0, 0.0, 0.5]).unwrap();
        assert!(close(
            expectation(&half, &Direction::new(0.0, 0.0).unwrap()),
            0.5,
            1e-15
        ));
    }

    #[test]
    fn purity_flags() {
        assert!(DensityOperator::from_bloch([0.6, 0.0, 0.8])
            .unwrap()
            .is_pure());
        assert!(!DensityOperator::from_bloch([0.6, 0.0, 0.0])
            .unwrap()
            .is_pure());
        assert!(close(
            DensityOperator::maximally_mixed().purity(),
            0.5,
            1e-15
        ));
    }
}
