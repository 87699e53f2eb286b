//! Dense statevector engine.
//!
//! Basis index convention: bit `k` of a basis index is the state of qubit `k`,
//! so qubit 0 is the least significant bit. Every other module relies on this.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Largest register the dense engine will allocate.
pub const MAX_QUBITS: usize = 24;

/// A 2x2 complex matrix in row-major order, `m[row][col]`.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("register size {0} outside 1..={MAX_QUBITS}")]
    Size(usize),
    #[error("qubit {qubit} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("two-qubit gate needs distinct operands, got {0} twice")]
    RepeatedOperand(usize),
    #[error("basis index {index} out of range for {num_qubits}-qubit register")]
    BasisIndex { index: usize, num_qubits: usize },
}

/// Controlled two-qubit gates understood by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoQubitKind {
    Cnot,
    Cz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state on `num_qubits` qubits.
    pub fn new_zero_state(num_qubits: usize) -> Result<Self, StateError> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(StateError::Size(num_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        let mut state = Self::new_zero_state(num_qubits)?;
        if index >= state.amplitudes.len() {
            return Err(StateError::BasisIndex { index, num_qubits });
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit < self.num_qubits {
            Ok(())
        } else {
            Err(StateError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            })
        }
    }

    /// Applies `unitary` to `qubit`. Diagonal and anti-diagonal matrices take
    /// cheaper paths; the result is the same tensor-product action either way.
    pub fn apply_single_qubit(
        &mut self,
        unitary: &Matrix2,
        qubit: usize,
    ) -> Result<(), StateError> {
        self.check_qubit(qubit)?;
        let zero = Complex64::new(0.0, 0.0);
        let [[m00, m01], [m10, m11]] = *unitary;
        let stride = 1usize << qubit;
        let dim = self.amplitudes.len();

        if m01 == zero && m10 == zero {
            for block in (0..dim).step_by(stride << 1) {
                for i in block..block + stride {
                    self.amplitudes[i] *= m00;
                    self.amplitudes[i | stride] *= m11;
                }
            }
        } else if m00 == zero && m11 == zero {
            for block in (0..dim).step_by(stride << 1) {
                for i in block..block + stride {
                    let a0 = self.amplitudes[i];
                    let a1 = self.amplitudes[i | stride];
                    self.amplitudes[i] = m01 * a1;
                    self.amplitudes[i | stride] = m10 * a0;
                }
            }
        } else {
            for block in (0..dim).step_by(stride << 1) {
                for i in block..block + stride {
                    let a0 = self.amplitudes[i];
                    let a1 = self.amplitudes[i | stride];
                    self.amplitudes[i] = m00 * a0 + m01 * a1;
                    self.amplitudes[i | stride] = m10 * a0 + m11 * a1;
                }
            }
        }
        Ok(())
    }

    pub fn apply_two_qubit(
        &mut self,
        kind: TwoQubitKind,
        control: usize,
        target: usize,
    ) -> Result<(), StateError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(StateError::RepeatedOperand(control));
        }
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        match kind {
            TwoQubitKind::Cnot => {
                // Visit each pair once, from the member with the target bit clear.
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
            TwoQubitKind::Cz => {
                let both = cmask | tmask;
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & both == both {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn probability_of(&self, basis_index: usize) -> Result<f64, StateError> {
        self.amplitudes
            .get(basis_index)
            .map(|a| a.norm_sqr())
            .ok_or(StateError::BasisIndex {
                index: basis_index,
                num_qubits: self.num_qubits,
            })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws one full-register measurement outcome without collapsing the state.
    pub fn sample_measurement<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        Cdf::from_state(self).sample_with(u)
    }

    /// Index of the largest-probability basis state and that probability.
    pub fn dominant_basis_state(&self) -> (usize, f64) {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| {
                if p > best.1 {
                    (i, p)
                } else {
                    best
                }
            })
    }
}

/// Cumulative distribution over basis outcomes, used for inverse-CDF sampling
/// of many shots from one state.
#[derive(Debug, Clone)]
pub struct Cdf {
    cumulative: Vec<f64>,
}

impl Cdf {
    pub fn from_state(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cumulative = state
            .amplitudes
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Maps a uniform draw `u` in `[0, 1)` to an outcome. Draws past the
    /// accumulated total (rounding) land on the last outcome with support.
    pub fn sample_with(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("non-empty state");
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        if idx < self.cumulative.len() {
            idx
        } else {
            let last_mass = self
                .cumulative
                .windows(2)
                .rposition(|w| w[1] > w[0])
                .map(|p| p + 1)
                .unwrap_or(0);
            last_mass
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.gen())
    }
}

pub mod matrices {
    //! Standard single-qubit unitaries.
    use super::Matrix2;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    const fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub const ID: Matrix2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    pub const X: Matrix2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
    pub const Y: Matrix2 = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
    pub const Z: Matrix2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
    pub const H: Matrix2 = [
        [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
        [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
    ];
    /// Square root of X.
    pub const SX: Matrix2 = [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]];

    /// `diag(e^{-iθ/2}, e^{iθ/2})`
    pub fn rz(theta: f64) -> Matrix2 {
        [
            [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
        ]
    }

    pub fn adjoint(m: &Matrix2) -> Matrix2 {
        [
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ]
    }

    pub fn is_unitary(m: &Matrix2, tol: f64) -> bool {
        let a = adjoint(m);
        (0..2).all(|i| {
            (0..2).all(|j| {
                let v = a[i][0] * m[0][j] + a[i][1] * m[1][j];
                let expect = if i == j { 1.0 } else { 0.0 };
                (v - Complex64::new(expect, 0.0)).norm() < tol
            })
        })
    }
}
