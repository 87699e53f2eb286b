//! Gate-list circuit representation with depth and gate-count accounting.

mod qasm;
mod transpile;

pub use qasm::{emit_qasm, emit_qasm_measured, parse_qasm, QasmError};
pub use transpile::{cancel_adjacent_pairs, transpile_to_basis};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::qstate::{matrices, Matrix2, StateError, StateVector, TwoQubitKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("gate {gate} touches qubit {qubit} but the circuit has {num_qubits} qubits")]
    OperandOutOfRange {
        gate: String,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("two-qubit gate {0} repeats an operand")]
    RepeatedOperand(String),
    #[error("rz angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("circuit has {circuit} qubits, state has {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Gate kind without operands; the key for gate-count tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    Id,
    X,
    Z,
    H,
    Sx,
    Rz,
    Cnot,
    Cz,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Id,
        GateKind::X,
        GateKind::Z,
        GateKind::H,
        GateKind::Sx,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Cz,
    ];

    /// Lower-case mnemonic, matching the QASM gate name.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Id => "id",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::Sx => "sx",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cx",
            GateKind::Cz => "cz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Id(usize),
    X(usize),
    Z(usize),
    H(usize),
    Sx(usize),
    Rz { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Id(_) => GateKind::Id,
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
            Gate::Sx(_) => GateKind::Sx,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz(..) => GateKind::Cz,
        }
    }

    /// Operand qubits; for CNOT the control comes first.
    pub fn qubits(&self) -> Operands {
        match *self {
            Gate::Id(q) | Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::Sx(q) => Operands::One(q),
            Gate::Rz { qubit, .. } => Operands::One(qubit),
            Gate::Cnot { control, target } => Operands::Two(control, target),
            Gate::Cz(a, b) => Operands::Two(a, b),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.qubits(), Operands::Two(..))
    }

    /// The 2x2 unitary of a single-qubit gate.
    pub fn matrix(&self) -> Option<Matrix2> {
        Some(match *self {
            Gate::Id(_) => matrices::ID,
            Gate::X(_) => matrices::X,
            Gate::Z(_) => matrices::Z,
            Gate::H(_) => matrices::H,
            Gate::Sx(_) => matrices::SX,
            Gate::Rz { angle, .. } => matrices::rz(angle),
            Gate::Cnot { .. } | Gate::Cz(..) => return None,
        })
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<(), StateError> {
        match (self.qubits(), self.matrix()) {
            (Operands::One(q), Some(m)) => state.apply_single_qubit(&m, q),
            (Operands::Two(a, b), _) => {
                let kind = if self.kind() == GateKind::Cz {
                    TwoQubitKind::Cz
                } else {
                    TwoQubitKind::Cnot
                };
                state.apply_two_qubit(kind, a, b)
            }
            (Operands::One(_), None) => unreachable!("single-qubit gates have a matrix"),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rz { qubit, angle } => write!(f, "rz({angle}) q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control} -> q{target}"),
            Gate::Cz(a, b) => write!(f, "cz q{a}, q{b}"),
            Gate::Id(q) | Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::Sx(q) => {
                write!(f, "{} q{q}", self.kind().name())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operands {
    One(usize),
    Two(usize, usize),
}

impl Operands {
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Operands::One(q) => (q, None),
            Operands::Two(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }
}

/// An ordered gate list over a fixed number of qubits. Every operand is
/// checked against the width on insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(
        num_qubits: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        for q in gate.qubits().iter() {
            if q >= self.num_qubits {
                return Err(CircuitError::OperandOutOfRange {
                    gate: gate.to_string(),
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        if let Operands::Two(a, b) = gate.qubits() {
            if a == b {
                return Err(CircuitError::RepeatedOperand(gate.to_string()));
            }
        }
        if let Gate::Rz { angle, .. } = gate {
            if !angle.is_finite() {
                return Err(CircuitError::NonFiniteAngle(angle));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`; both circuits must have the same width.
    pub fn extend(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if other.num_qubits != self.num_qubits {
            return Err(CircuitError::WidthMismatch {
                circuit: self.num_qubits,
                state: other.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// ASAP layer of every gate (1-based): one past the latest layer of any
    /// earlier gate sharing an operand.
    pub fn layers(&self) -> Vec<usize> {
        let mut frontier = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| {
                let layer = g.qubits().iter().map(|q| frontier[q]).max().unwrap_or(0) + 1;
                for q in g.qubits().iter() {
                    frontier[q] = layer;
                }
                layer
            })
            .collect()
    }

    /// Number of ASAP layers. Terminal measurement is not part of a circuit.
    pub fn depth(&self) -> usize {
        self.layers().into_iter().max().unwrap_or(0)
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut by_kind = BTreeMap::new();
        for g in &self.gates {
            *by_kind.entry(g.kind()).or_insert(0) += 1;
        }
        GateCounts {
            by_kind,
            total: self.gates.len(),
        }
    }

    /// Runs the circuit on `state` in place.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<(), CircuitError> {
        if state.num_qubits() != self.num_qubits {
            return Err(CircuitError::WidthMismatch {
                circuit: self.num_qubits,
                state: state.num_qubits(),
            });
        }
        for g in &self.gates {
            g.apply(state)?;
        }
        Ok(())
    }

    /// Runs the circuit from `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector, CircuitError> {
        let mut state = StateVector::new_zero_state(self.num_qubits)?;
        self.apply_to(&mut state)?;
        Ok(state)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Per-kind gate tally. Kinds that never occur are absent from `by_kind`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub by_kind: BTreeMap<GateKind, usize>,
    pub total: usize,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        self.by_kind.get(&kind).copied().unwrap_or(0)
    }
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .by_kind
            .iter()
            .map(|(k, v)| format!("{}={v}", k.name()))
            .collect();
        write!(f, "total={} [{}]", self.total, parts.join(" "))
    }
}
