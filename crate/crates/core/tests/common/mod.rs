//! Dense reference model built straight from gate definitions. Shares no code
//! with the statevector engine.

#![allow(dead_code)]

use num_complex::Complex64;
use superdense::circuit::{Circuit, Gate};

pub type Dense = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_qubit(gate: &Gate) -> Option<(usize, [[Complex64; 2]; 2])> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (z, o) = (c(0.0, 0.0), c(1.0, 0.0));
    Some(match *gate {
        Gate::Id(q) => (q, [[o, z], [z, o]]),
        Gate::X(q) => (q, [[z, o], [o, z]]),
        Gate::Z(q) => (q, [[o, z], [z, -o]]),
        Gate::H(q) => (q, [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]),
        Gate::Sx(q) => (
            q,
            [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        ),
        Gate::Rz { qubit, angle } => (
            qubit,
            [
                [Complex64::from_polar(1.0, -angle / 2.0), z],
                [z, Complex64::from_polar(1.0, angle / 2.0)],
            ],
        ),
        Gate::Cnot { .. } | Gate::Cz(..) => return None,
    })
}

fn bit(x: usize, q: usize) -> usize {
    (x >> q) & 1
}

/// Full `2^n × 2^n` matrix of one gate, `m[row][col]`.
pub fn gate_matrix(gate: &Gate, n: usize) -> Dense {
    let dim = 1usize << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    match *gate {
        Gate::Cnot { control, target } => {
            for (row, line) in m.iter_mut().enumerate() {
                let col = if bit(row, control) == 1 {
                    row ^ (1 << target)
                } else {
                    row
                };
                line[col] = c(1.0, 0.0);
            }
        }
        Gate::Cz(a, b) => {
            for (k, row) in m.iter_mut().enumerate() {
                row[k] = if bit(k, a) & bit(k, b) == 1 {
                    c(-1.0, 0.0)
                } else {
                    c(1.0, 0.0)
                };
            }
        }
        _ => {
            let (q, u) = one_qubit(gate).unwrap();
            for (row, line) in m.iter_mut().enumerate() {
                for (col, entry) in line.iter_mut().enumerate() {
                    if row & !(1 << q) == col & !(1 << q) {
                        *entry = u[bit(row, q)][bit(col, q)];
                    }
                }
            }
        }
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let dim = a.len();
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Product of gate matrices, later gates on the left.
pub fn circuit_unitary(circuit: &Circuit) -> Dense {
    let n = circuit.num_qubits();
    let dim = 1usize << n;
    let mut u: Dense = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    for gate in circuit.gates() {
        u = matmul(&gate_matrix(gate, n), &u);
    }
    u
}

/// Largest entrywise deviation between `a` and `e^{iφ} b`, with φ fixed by
/// the largest entry of `a`.
pub fn phase_distance(a: &Dense, b: &Dense) -> f64 {
    let mut best = (0, 0);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if x.norm() > a[best.0][best.1].norm() {
                best = (i, j);
            }
        }
    }
    if b[best.0][best.1].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let phase = a[best.0][best.1] / b[best.0][best.1];
    let phase = phase / phase.norm();
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(move |(x, y)| (x - y * phase).norm()))
        .fold(0.0, f64::max)
}

/// Final state of `circuit` on `|0…0⟩`, evolved one gate at a time from the
/// same definitions as [`gate_matrix`].
pub fn final_state(circuit: &Circuit) -> Vec<Complex64> {
    let dim = 1usize << circuit.num_qubits();
    let mut psi = vec![c(0.0, 0.0); dim];
    psi[0] = c(1.0, 0.0);
    for gate in circuit.gates() {
        psi = match *gate {
            Gate::Cnot { control, target } => (0..dim)
                .map(|row| {
                    psi[if bit(row, control) == 1 {
                        row ^ (1 << target)
                    } else {
                        row
                    }]
                })
                .collect(),
            Gate::Cz(a, b) => (0..dim)
                .map(|k| {
                    if bit(k, a) & bit(k, b) == 1 {
                        -psi[k]
                    } else {
                        psi[k]
                    }
                })
                .collect(),
            _ => {
                let (q, u) = one_qubit(gate).unwrap();
                (0..dim)
                    .map(|row| {
                        let r = bit(row, q);
                        u[r][0] * psi[row & !(1 << q)] + u[r][1] * psi[row | (1 << q)]
                    })
                    .collect()
            }
        };
    }
    psi
}

/// Basis index the decoder should leave behind for message bits `bits`
/// (index 0 is the least significant bit of the message).
pub fn expected_outcome(bits: &[bool]) -> usize {
    let n = bits.len();
    // qubit q reads b_{n-1-q}
    (0..n)
        .filter(|&q| bits[n - 1 - q])
        .map(|q| 1usize << q)
        .sum()
}
