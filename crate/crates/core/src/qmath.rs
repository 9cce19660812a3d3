//! Small dense complex linear algebra for registers of at most eight qubits.
//!
//! Register convention: qubit 0 is the leftmost label and the most
//! significant bit of an amplitude index. Every operator and state in the
//! crate uses this ordering, so `tensor(&[a, b])` acts with `a` on qubit 0.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Cplx = Complex64;

/// Default max-norm tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 8;
/// Below this probability a forced outcome is rejected.
pub const IMPOSSIBLE_BRANCH: f64 = 1e-14;

const NORM_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-9;

pub const ZERO: Cplx = Cplx::new(0.0, 0.0);
pub const ONE: Cplx = Cplx::new(1.0, 0.0);
pub const I: Cplx = Cplx::new(0.0, 1.0);

/// `e^{iφ}`.
pub fn phase(phi: f64) -> Cplx {
    Cplx::from_polar(1.0, phi)
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n));
    }
    Ok(n)
}

fn max_abs(values: impl Iterator<Item = Cplx>) -> f64 {
    values.map(|c| c.norm()).fold(0.0, f64::max)
}

/// Dense square complex matrix of dimension `2^k`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Cplx>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Cplx>) -> Result<Self> {
        qubits_for_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Operator { dim, entries })
    }

    /// Builds a 2×2 operator from rows.
    pub fn from_rows2(rows: [[Cplx; 2]; 2]) -> Self {
        Operator {
            dim: 2,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = ONE;
        }
        Operator { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn diagonal(diag: &[Cplx]) -> Result<Self> {
        let dim = diag.len();
        qubits_for_dim(dim)?;
        let mut op = Operator::zeros(dim);
        for (k, d) in diag.iter().enumerate() {
            op.entries[k * dim + k] = *d;
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx {
        self.entries[row * self.dim + col]
    }

    pub fn scale(&self, factor: Cplx) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn adjoint(&self) -> Operator {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Operator { dim: d, entries }
    }

    pub fn transpose(&self) -> Operator {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c];
            }
        }
        Operator { dim: d, entries }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut entries = vec![ZERO; d * d];
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.entries[r1 * a + c1];
                if x == ZERO {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        entries[(r1 * b + r2) * d + c1 * b + c2] = x * other.entries[r2 * b + c2];
                    }
                }
            }
        }
        Operator { dim: d, entries }
    }

    pub fn trace(&self) -> Cplx {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        max_abs(self.entries.iter().zip(&other.entries).map(|(a, b)| a - b))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Determinant of a 2×2 operator.
    pub fn det2(&self) -> Cplx {
        assert_eq!(self.dim, 2, "det2 needs a 2x2 operator");
        self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2]
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply_to(&self, amps: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(amps.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|r| {
                self.entries[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(amps)
                    .map(|(m, a)| m * a)
                    .sum()
            })
            .collect()
    }
}

impl std::ops::Mul<&Operator> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let x = self.entries[r * d + k];
                if x == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += x * rhs.entries[k * d + c];
                }
            }
        }
        Operator { dim: d, entries }
    }
}

impl std::ops::Add<&Operator> for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub<&Operator> for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

pub fn identity2() -> Operator {
    Operator::identity(2)
}

pub fn pauli_x() -> Operator {
    Operator::from_rows2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> Operator {
    Operator::from_rows2([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Operator {
    Operator::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn hadamard() -> Operator {
    let h = Cplx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Operator::from_rows2([[h, h], [h, -h]])
}

/// Kronecker product of all factors, left to right.
pub fn tensor(factors: &[Operator]) -> Result<Operator> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyTensor)?;
    let total: usize = factors.iter().map(Operator::n_qubits).sum();
    if total > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(total));
    }
    Ok(rest.iter().fold(first.clone(), |acc, f| acc.kron(f)))
}

/// Real unit vector in three dimensions (a rotation axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: UnitVec3 = UnitVec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: UnitVec3 = UnitVec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Accepts components whose norm is within 1e-9 of one. Inputs further
    /// than 1e-12 from unit norm are rescaled so the stored vector is unit.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("axis"));
        }
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector { x, y, z, norm });
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Ok(UnitVec3 {
                x: x / norm,
                y: y / norm,
                z: z / norm,
            });
        }
        Ok(UnitVec3 { x, y, z })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::NotUnitVector { x, y, z, norm });
        }
        Ok(UnitVec3 {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVec3) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// `n·σ = n_x X + n_y Y + n_z Z`.
    pub fn sigma(&self) -> Operator {
        let (x, y, z) = (self.x, self.y, self.z);
        Operator::from_rows2([
            [Cplx::new(z, 0.0), Cplx::new(x, -y)],
            [Cplx::new(x, y), Cplx::new(-z, 0.0)],
        ])
    }
}

/// Rotation by `theta` about `n`: `cos(θ/2)·I − i·sin(θ/2)·(n·σ)`.
pub fn rotation(n: &UnitVec3, theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let (x, y, z) = (n.x, n.y, n.z);
    Operator::from_rows2([
        [Cplx::new(c, -s * z), Cplx::new(-s * y, -s * x)],
        [Cplx::new(s * y, -s * x), Cplx::new(c, s * z)],
    ])
}

pub fn rotation_y(theta: f64) -> Operator {
    rotation(&UnitVec3::Y, theta)
}

pub fn rotation_z(theta: f64) -> Operator {
    rotation(&UnitVec3::Z, theta)
}

/// Orthonormal basis of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis2 {
    vectors: [[Cplx; 2]; 2],
}

impl Basis2 {
    pub fn new(first: [Cplx; 2], second: [Cplx; 2]) -> Result<Self> {
        let gram = |u: &[Cplx; 2], v: &[Cplx; 2]| u[0].conj() * v[0] + u[1].conj() * v[1];
        let deviation = [
            (gram(&first, &first) - ONE).norm(),
            (gram(&second, &second) - ONE).norm(),
            gram(&first, &second).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if deviation > NORM_TOL {
            return Err(Error::NotOrthonormal(deviation));
        }
        Ok(Basis2 {
            vectors: [first, second],
        })
    }

    pub fn computational() -> Self {
        Basis2 {
            vectors: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// `{|+⟩, |−⟩}`.
    pub fn plus_minus() -> Self {
        let h = Cplx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Basis2 {
            vectors: [[h, h], [h, -h]],
        }
    }

    pub fn vector(&self, index: usize) -> [Cplx; 2] {
        self.vectors[index]
    }
}

/// `|μ(θ)⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩`, `|ν(θ)⟩ = sin(θ/2)|0⟩ − cos(θ/2)|1⟩`.
pub fn meas_basis_mu_nu(theta: f64) -> Basis2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Basis2 {
        vectors: [
            [Cplx::new(c, 0.0), Cplx::new(s, 0.0)],
            [Cplx::new(s, 0.0), Cplx::new(-c, 0.0)],
        ],
    }
}

/// Amplitude vector over a register of `n_qubits` qubits.
///
/// Constructors and unitary operations keep the vector normalized. Applying
/// a non-unitary gate yields an unnormalized intermediate, which is how the
/// imperfect-gate model represents its practical branch before renormalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    n_qubits: usize,
    amps: Vec<Cplx>,
}

impl StateVec {
    pub fn new(amps: Vec<Cplx>) -> Result<Self> {
        let state = StateVec::unnormalized(amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Accepts any amplitude vector of power-of-two length.
    pub fn unnormalized(amps: Vec<Cplx>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amps.len())?;
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("amplitude"));
        }
        Ok(StateVec { n_qubits, amps })
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n_qubits));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVec { n_qubits, amps })
    }

    pub fn qubit(amp0: Cplx, amp1: Cplx) -> Result<Self> {
        StateVec::new(vec![amp0, amp1])
    }

    /// Tensor product of the given states, leftmost factor on qubit 0.
    pub fn product(factors: &[StateVec]) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or(Error::EmptyTensor)?;
        let total: usize = factors.iter().map(|s| s.n_qubits).sum();
        if total > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(total));
        }
        Ok(rest.iter().fold(first.clone(), |acc, s| acc.kron(s)))
    }

    fn kron(&self, other: &StateVec) -> StateVec {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVec {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Cplx] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Cplx {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVec) -> Cplx {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: Cplx) -> StateVec {
        StateVec {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Rescales to unit norm; fails on a (numerically) zero vector.
    pub fn normalized(&self) -> Result<StateVec> {
        let norm = self.norm();
        if norm < 1e-150 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self.scale(Cplx::new(1.0 / norm, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &StateVec) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        max_abs(self.amps.iter().zip(&other.amps).map(|(a, b)| a - b))
    }
}

fn check_targets(n_qubits: usize, targets: &[usize]) -> Result<()> {
    for (k, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: t, n_qubits });
        }
        if targets[..k].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Applies `gate` to the listed qubits; `targets[0]` is the gate's most
/// significant local qubit.
pub fn apply(state: &StateVec, gate: &Operator, targets: &[usize]) -> Result<StateVec> {
    check_targets(state.n_qubits, targets)?;
    let expected = 1usize << targets.len();
    if gate.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: gate.dim(),
        });
    }
    let n = state.n_qubits;
    let masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
    let k = targets.len();
    let target_mask: usize = masks.iter().sum();
    // Scatter a local gate index into register bit positions.
    let spread = |local: usize| -> usize {
        masks
            .iter()
            .enumerate()
            .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
            .map(|(_, m)| m)
            .sum()
    };
    let offsets: Vec<usize> = (0..expected).map(spread).collect();
    let mut out = vec![ZERO; state.amps.len()];
    for base in (0..state.amps.len()).filter(|i| i & target_mask == 0) {
        for (row, &ro) in offsets.iter().enumerate() {
            out[base | ro] = offsets
                .iter()
                .enumerate()
                .map(|(col, &co)| gate.get(row, col) * state.amps[base | co])
                .sum();
        }
    }
    Ok(StateVec {
        n_qubits: n,
        amps: out,
    })
}

/// Contracts `qubit` with the bra `⟨v|`, leaving an unnormalized state on
/// the remaining qubits (order preserved).
pub fn contract(state: &StateVec, qubit: usize, v: [Cplx; 2]) -> Result<StateVec> {
    check_targets(state.n_qubits, &[qubit])?;
    if state.n_qubits == 1 {
        return Err(Error::InvalidArgument(
            "cannot contract a single-qubit register".into(),
        ));
    }
    let n = state.n_qubits;
    let shift = n - 1 - qubit;
    let low = (1usize << shift) - 1;
    let amps = (0..1usize << (n - 1))
        .map(|rest| {
            let i0 = ((rest & !low) << 1) | (rest & low);
            let i1 = i0 | (1 << shift);
            v[0].conj() * state.amps[i0] + v[1].conj() * state.amps[i1]
        })
        .collect();
    Ok(StateVec {
        n_qubits: n - 1,
        amps,
    })
}

/// Inserts the single-qubit vector `v` at position `qubit`.
pub fn expand(state: &StateVec, qubit: usize, v: [Cplx; 2]) -> Result<StateVec> {
    let n = state.n_qubits + 1;
    if qubit >= n {
        return Err(Error::QubitOutOfRange { qubit, n_qubits: n });
    }
    if n > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n));
    }
    let shift = n - 1 - qubit;
    let low = (1usize << shift) - 1;
    let mut amps = vec![ZERO; 1 << n];
    for (rest, a) in state.amps.iter().enumerate() {
        let i0 = ((rest & !low) << 1) | (rest & low);
        amps[i0] = v[0] * a;
        amps[i0 | (1 << shift)] = v[1] * a;
    }
    Ok(StateVec { n_qubits: n, amps })
}

/// Where a measurement outcome comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeSource {
    /// One uniform draw from a ChaCha8 stream seeded with the value.
    Sampled(u64),
    /// Post-select the given basis index.
    Forced(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    pub probability: f64,
    /// Probabilities of both basis outcomes, summing to one.
    pub probabilities: [f64; 2],
    /// Full register, measured qubit set to the observed basis vector.
    pub post_state: StateVec,
    /// Remaining qubits after contracting the measured one, normalized.
    pub residual: StateVec,
}

/// Projective measurement of one qubit in an orthonormal basis.
///
/// Probabilities are taken relative to the state's squared norm, so the
/// function also accepts unnormalized intermediates.
pub fn measure(
    state: &StateVec,
    qubit: usize,
    basis: &Basis2,
    source: OutcomeSource,
) -> Result<Measurement> {
    let total = state.norm_sqr();
    if total < 1e-300 {
        return Err(Error::NotNormalized(total.sqrt()));
    }
    let residuals = [
        contract(state, qubit, basis.vector(0))?,
        contract(state, qubit, basis.vector(1))?,
    ];
    let probabilities = [
        residuals[0].norm_sqr() / total,
        residuals[1].norm_sqr() / total,
    ];
    let outcome = match source {
        OutcomeSource::Forced(k) if k > 1 => return Err(Error::InvalidOutcome(k)),
        OutcomeSource::Forced(k) => k,
        OutcomeSource::Sampled(seed) => {
            let u: f64 = ChaCha8Rng::seed_from_u64(seed).random();
            usize::from(u >= probabilities[0])
        }
    };
    let probability = probabilities[outcome];
    if probability < IMPOSSIBLE_BRANCH {
        return Err(Error::ImpossibleBranch(probability));
    }
    let residual = residuals[outcome].normalized()?;
    let post_state = expand(&residual, qubit, basis.vector(outcome))?;
    Ok(Measurement {
        outcome,
        probability,
        probabilities,
        post_state,
        residual,
    })
}

/// Flat amplitude view shared by operators and states.
pub trait Amplitudes {
    fn shape(&self) -> (usize, usize);
    fn flat(&self) -> &[Cplx];
}

impl Amplitudes for Operator {
    fn shape(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    fn flat(&self) -> &[Cplx] {
        &self.entries
    }
}

impl Amplitudes for StateVec {
    fn shape(&self) -> (usize, usize) {
        (self.amps.len(), 1)
    }

    fn flat(&self) -> &[Cplx] {
        &self.amps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComparison {
    pub equal: bool,
    /// `e^{iφ}` with `B ≈ e^{iφ}A`; `None` when the inputs are not proportional.
    pub phase: Option<Cplx>,
    /// `max |B − e^{iφ}A|`, or the larger max-modulus when not proportional.
    pub deviation: f64,
}

/// Tests `b = e^{iφ}·a` within `tol`, extracting the phase from the
/// flattened inner product `⟨a, b⟩ / |⟨a, b⟩|`.
pub fn equal_up_to_global_phase<T: Amplitudes>(a: &T, b: &T, tol: f64) -> Result<PhaseComparison> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.shape().0 * a.shape().1,
            actual: b.shape().0 * b.shape().1,
        });
    }
    let (fa, fb) = (a.flat(), b.flat());
    let inner: Cplx = fa.iter().zip(fb).map(|(x, y)| x.conj() * y).sum();
    let norm_a = fa.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let norm_b = fb.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm_a == 0.0 && norm_b == 0.0 {
        return Ok(PhaseComparison {
            equal: true,
            phase: Some(ONE),
            deviation: 0.0,
        });
    }
    if inner.norm() <= 1e-15 * norm_a * norm_b || norm_a == 0.0 || norm_b == 0.0 {
        let deviation = max_abs(fa.iter().copied()).max(max_abs(fb.iter().copied()));
        return Ok(PhaseComparison {
            equal: false,
            phase: None,
            deviation,
        });
    }
    let phi = inner / inner.norm();
    let deviation = max_abs(fa.iter().zip(fb).map(|(x, y)| y - phi * x));
    Ok(PhaseComparison {
        equal: deviation <= tol,
        phase: Some(phi),
        deviation,
    })
}
