//! Rewriting into the device basis `{id, x, sx, rz, cz}` and self-inverse
//! pair cancellation.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{Circuit, Gate};

fn push_h(out: &mut Vec<Gate>, qubit: usize) {
    out.push(Gate::Rz {
        qubit,
        angle: FRAC_PI_2,
    });
    out.push(Gate::Sx(qubit));
    out.push(Gate::Rz {
        qubit,
        angle: FRAC_PI_2,
    });
}

/// Rewrites every gate into `{Id, X, Sx, Rz, Cz}`. The result equals the input
/// up to a global phase:
///
/// - `h  → rz(π/2) · sx · rz(π/2)`
/// - `z  → rz(π)`
/// - `cx(c, t) → h(t) · cz(c, t) · h(t)`, with both `h` expanded
///
/// Basis gates pass through unchanged. No cancellation is done here.
pub fn transpile_to_basis(circuit: &Circuit) -> Circuit {
    let mut out = Vec::with_capacity(circuit.len() * 3);
    for &gate in circuit.gates() {
        match gate {
            Gate::H(q) => push_h(&mut out, q),
            Gate::Z(q) => out.push(Gate::Rz {
                qubit: q,
                angle: PI,
            }),
            Gate::Cnot { control, target } => {
                push_h(&mut out, target);
                out.push(Gate::Cz(control, target));
                push_h(&mut out, target);
            }
            Gate::Id(_) | Gate::X(_) | Gate::Sx(_) | Gate::Rz { .. } | Gate::Cz(..) => {
                out.push(gate)
            }
        }
    }
    Circuit {
        num_qubits: circuit.num_qubits(),
        gates: out,
    }
}

fn is_self_inverse(gate: &Gate) -> bool {
    matches!(
        gate,
        Gate::X(_) | Gate::Z(_) | Gate::H(_) | Gate::Cnot { .. } | Gate::Cz(..)
    )
}

/// Same kind on the same operands. CZ is symmetric, so its operand order is ignored.
fn same_gate(a: &Gate, b: &Gate) -> bool {
    match (a, b) {
        (Gate::Cz(a0, a1), Gate::Cz(b0, b1)) => (a0, a1) == (b0, b1) || (a0, a1) == (b1, b0),
        _ => a == b,
    }
}

fn cancel_pass(circuit: &Circuit) -> Vec<Gate> {
    let mut kept: Vec<Option<Gate>> = Vec::with_capacity(circuit.len());
    // Per qubit, indices into `kept` of surviving gates touching it.
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); circuit.num_qubits()];

    for gate in circuit.gates() {
        let qubits: Vec<usize> = gate.qubits().iter().collect();
        if is_self_inverse(gate) {
            let tops: Vec<Option<usize>> =
                qubits.iter().map(|&q| stacks[q].last().copied()).collect();
            if let Some(Some(j)) = tops.first().copied() {
                let all_same = tops.iter().all(|t| *t == Some(j));
                if all_same && kept[j].is_some_and(|prev| same_gate(&prev, gate)) {
                    kept[j] = None;
                    for &q in &qubits {
                        stacks[q].pop();
                    }
                    continue;
                }
            }
        }
        let idx = kept.len();
        kept.push(Some(*gate));
        for &q in &qubits {
            stacks[q].push(idx);
        }
    }
    kept.into_iter().flatten().collect()
}

/// Removes pairs of identical self-inverse gates (`x`, `z`, `h`, `cx`, `cz`)
/// that meet on their operands with no gate touching those qubits in between.
/// Repeats until nothing cancels, so the result is a fixed point.
pub fn cancel_adjacent_pairs(circuit: &Circuit) -> Circuit {
    let mut current = circuit.clone();
    loop {
        let gates = cancel_pass(&current);
        if gates.len() == current.len() {
            return current;
        }
        current.gates = gates;
    }
}
