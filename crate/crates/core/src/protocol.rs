//! n-bit superdense coding over an n-qubit GHZ resource.
//!
//! Qubits `0..n-1` belong to the sender, who encodes all `n` message bits on
//! them with Pauli X/Z gates; qubit `n-1` stays with the receiver. After the
//! sender's qubits arrive, the receiver undoes the GHZ preparation in mirror
//! order and measures every qubit.
//!
//! Message strings are written `b_{n-1} … b_1 b_0`: index 0 is the rightmost
//! character, so the string reads as an ordinary binary number.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};

pub const MIN_MESSAGE_BITS: usize = 2;
pub const MAX_MESSAGE_BITS: usize = crate::qstate::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("message length {0} outside {MIN_MESSAGE_BITS}..={MAX_MESSAGE_BITS}")]
    Length(usize),
    #[error("invalid message character '{ch}' at position {position}; expected '0' or '1'")]
    InvalidChar { ch: char, position: usize },
    #[error("value {value} does not fit in {n} bits")]
    ValueTooLarge { value: u64, n: usize },
    #[error("expected {expected} measured bits, got {got}")]
    ReadoutLength { expected: usize, got: usize },
    #[error(
        "noiseless run of {message} ended in a superposition (max probability {max_probability})"
    )]
    NotBasisState {
        message: String,
        max_probability: f64,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A classical message of `n` bits; `bit(0)` is the zeroth bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    /// Bits given in index order (`bits[0]` is bit 0).
    pub fn from_bits(bits: Vec<bool>) -> Result<Self, ProtocolError> {
        if !(MIN_MESSAGE_BITS..=MAX_MESSAGE_BITS).contains(&bits.len()) {
            return Err(ProtocolError::Length(bits.len()));
        }
        Ok(Self { bits })
    }

    /// The `n`-bit message whose binary value is `value`.
    pub fn from_value(value: u64, n: usize) -> Result<Self, ProtocolError> {
        if !(MIN_MESSAGE_BITS..=MAX_MESSAGE_BITS).contains(&n) {
            return Err(ProtocolError::Length(n));
        }
        if value >> n != 0 {
            return Err(ProtocolError::ValueTooLarge { value, n });
        }
        Ok(Self {
            bits: (0..n).map(|i| (value >> i) & 1 == 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn value(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn count_zeros(&self) -> usize {
        self.bits.iter().filter(|b| !**b).count()
    }

    /// Every `n`-bit message in increasing binary value.
    pub fn all(n: usize) -> Result<impl Iterator<Item = Message>, ProtocolError> {
        Message::from_value(0, n)?;
        Ok((0..1u64 << n).map(move |v| Message::from_value(v, n).expect("value below 2^n")))
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Message {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for (position, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(ProtocolError::InvalidChar { ch, position }),
            }
        }
        bits.reverse();
        Message::from_bits(bits)
    }
}

fn check_width(n: usize) -> Result<(), ProtocolError> {
    if (MIN_MESSAGE_BITS..=MAX_MESSAGE_BITS).contains(&n) {
        Ok(())
    } else {
        Err(ProtocolError::Length(n))
    }
}

/// `H q0` followed by a CNOT fan-out from `q0` to every other qubit, which
/// prepares `(|0…0⟩ + |1…1⟩)/√2`.
pub fn build_ghz(n: usize) -> Result<Circuit, ProtocolError> {
    check_width(n)?;
    let gates =
        std::iter::once(Gate::H(0)).chain((1..n).map(|target| Gate::Cnot { control: 0, target }));
    Ok(Circuit::from_gates(n, gates)?)
}

/// The sender's encoding gates, in this order:
///
/// 1. `Z q0` if bit `n-1` is set;
/// 2. `X q0` if bit 0 is set;
/// 3. for `i` in `1..=n-2`, with `j = n-1-i`: `X qi` if bit `j` is set, then
///    `X qi` again if bit 0 is set.
///
/// Both X gates on a qubit are kept even when they cancel. The receiver's
/// qubit `n-1` is never touched.
pub fn encode_message(message: &Message) -> Result<Circuit, ProtocolError> {
    let n = message.len();
    let mut c = Circuit::new(n);
    if message.bit(n - 1) {
        c.push(Gate::Z(0))?;
    }
    if message.bit(0) {
        c.push(Gate::X(0))?;
    }
    for i in 1..=n - 2 {
        let j = n - 1 - i;
        if message.bit(j) {
            c.push(Gate::X(i))?;
        }
        if message.bit(0) {
            c.push(Gate::X(i))?;
        }
    }
    Ok(c)
}

/// GHZ preparation undone: the CNOT fan-out in reverse target order, then `H q0`.
pub fn build_decoder(n: usize) -> Result<Circuit, ProtocolError> {
    check_width(n)?;
    let gates = (1..n)
        .rev()
        .map(|target| Gate::Cnot { control: 0, target })
        .chain(std::iter::once(Gate::H(0)));
    Ok(Circuit::from_gates(n, gates)?)
}

/// All protocol stages for one message. The transmission stage has no gates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolCircuit {
    pub n: usize,
    pub stage1: Circuit,
    pub stage2: Circuit,
    pub stage4: Circuit,
    pub full: Circuit,
}

pub fn build_full(message: &Message) -> Result<ProtocolCircuit, ProtocolError> {
    let n = message.len();
    let stage1 = build_ghz(n)?;
    let stage2 = encode_message(message)?;
    let stage4 = build_decoder(n)?;
    let mut full = stage1.clone();
    full.extend(&stage2)?;
    full.extend(&stage4)?;
    Ok(ProtocolCircuit {
        n,
        stage1,
        stage2,
        stage4,
        full,
    })
}

/// Maps measured qubit values (indexed by qubit) to the message:
/// qubit 0 carries bit `n-1`, qubit `i` carries bit `n-1-i` for
/// `1 ≤ i ≤ n-2`, and the receiver's qubit `n-1` carries bit 0.
pub fn decode_readout(measured: &[bool], n: usize) -> Result<Message, ProtocolError> {
    if measured.len() != n {
        return Err(ProtocolError::ReadoutLength {
            expected: n,
            got: measured.len(),
        });
    }
    check_width(n)?;
    let mut bits = vec![false; n];
    bits[n - 1] = measured[0];
    for i in 1..=n - 2 {
        bits[n - 1 - i] = measured[i];
    }
    bits[0] = measured[n - 1];
    Message::from_bits(bits)
}

/// [`decode_readout`] on a basis index (bit `k` is qubit `k`), returning the
/// message's binary value. Allocation-free, for use in shot loops.
pub fn decode_outcome_value(outcome: usize, n: usize) -> u64 {
    let qubit = |k: usize| ((outcome >> k) & 1) as u64;
    let mut value = qubit(0) << (n - 1);
    for i in 1..=n - 2 {
        value |= qubit(i) << (n - 1 - i);
    }
    value | qubit(n - 1)
}

pub fn decode_outcome(outcome: usize, n: usize) -> Result<Message, ProtocolError> {
    let measured: Vec<bool> = (0..n).map(|k| (outcome >> k) & 1 == 1).collect();
    decode_readout(&measured, n)
}

/// Simulates the full protocol without noise and decodes the final basis
/// state. Fails if the final state is not a computational basis state.
pub fn round_trip(message: &Message) -> Result<Message, ProtocolError> {
    let pc = build_full(message)?;
    let state = pc.full.simulate()?;
    let (index, p) = state.dominant_basis_state();
    if p < 1.0 - 1e-9 {
        return Err(ProtocolError::NotBasisState {
            message: message.to_string(),
            max_probability: p,
        });
    }
    decode_outcome(index, pc.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn msg(s: &str) -> Message {
        s.parse().unwrap()
    }

    #[test]
    fn message_conventions() {
        let m = msg("1011");
        assert_eq!(m.len(), 4);
        assert!(m.bit(0) && m.bit(1) && !m.bit(2) && m.bit(3));
        assert_eq!(m.value(), 11);
        assert_eq!(m.to_string(), "1011");
        assert_eq!(Message::from_value(11, 4).unwrap(), m);
        assert_eq!(m.count_zeros(), 1);

        assert!(matches!(
            "201".parse::<Message>(),
            Err(ProtocolError::InvalidChar {
                ch: '2',
                position: 0
            })
        ));
        assert_eq!("1".parse::<Message>(), Err(ProtocolError::Length(1)));
        assert!(Message::from_value(16, 4).is_err());
        assert_eq!(Message::all(3).unwrap().count(), 8);
    }

    #[test]
    fn ghz_examples() {
        let bell = build_ghz(2).unwrap().simulate().unwrap();
        assert!((bell.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((bell.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < 1e-9);

        let ghz4 = build_ghz(4).unwrap();
        let s = ghz4.simulate().unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 15 {
                FRAC_1_SQRT_2
            } else {
                0.0
            };
            assert!((a.re - expect).abs() < 1e-9 && a.im.abs() < 1e-9);
        }
        assert_eq!(ghz4.depth(), 4);
        assert_eq!(build_ghz(1), Err(ProtocolError::Length(1)));
    }

    #[test]
    fn encoder_examples() {
        assert!(encode_message(&msg("0000")).unwrap().is_empty());
        assert_eq!(
            encode_message(&msg("1110")).unwrap().gates(),
            &[Gate::Z(0), Gate::X(1), Gate::X(2)]
        );
        assert_eq!(
            encode_message(&msg("0001")).unwrap().gates(),
            &[Gate::X(0), Gate::X(1), Gate::X(2)]
        );
        let all_ones = encode_message(&msg("1111")).unwrap();
        assert_eq!(
            all_ones.gates(),
            &[
                Gate::Z(0),
                Gate::X(0),
                Gate::X(1),
                Gate::X(1),
                Gate::X(2),
                Gate::X(2)
            ]
        );
        let counts = all_ones.gate_counts();
        assert_eq!(
            (
                counts.get(GateKind::Z),
                counts.get(GateKind::X),
                counts.total
            ),
            (1, 5, 6)
        );
    }

    #[test]
    fn decoder_examples() {
        assert_eq!(
            build_decoder(2).unwrap().gates(),
            &[
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
                Gate::H(0)
            ]
        );
        assert_eq!(build_decoder(4).unwrap().depth(), 4);

        let mut c = build_ghz(6).unwrap();
        c.extend(&build_decoder(6).unwrap()).unwrap();
        let s = c.simulate().unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-9);
        assert!((s.norm_sqr() - s.probability_of(0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn full_circuit_examples() {
        let pc = build_full(&msg("00")).unwrap();
        assert_eq!(
            pc.full.gates(),
            &[
                Gate::H(0),
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
                Gate::H(0)
            ]
        );
        assert_eq!(
            build_full(&msg("0001")).unwrap().full.gate_counts().total,
            11
        );
        assert_eq!(build_full(&msg("0000")).unwrap().stage2.depth(), 0);
    }

    #[test]
    fn readout_mapping() {
        assert_eq!(decode_readout(&[true, false], 2).unwrap(), msg("10"));
        assert_eq!(decode_readout(&[false; 4], 4).unwrap(), msg("0000"));
        assert_eq!(
            decode_readout(&[true, false, true, true], 4).unwrap(),
            msg("1011")
        );
        assert_eq!(
            decode_readout(&[true; 3], 4),
            Err(ProtocolError::ReadoutLength {
                expected: 4,
                got: 3
            })
        );
        for n in 2..=8 {
            for outcome in 0..1usize << n {
                assert_eq!(
                    decode_outcome(outcome, n).unwrap().value(),
                    decode_outcome_value(outcome, n)
                );
            }
        }
    }

    #[test]
    fn round_trip_small() {
        assert_eq!(round_trip(&msg("0000")).unwrap(), msg("0000"));
        for m in Message::all(6).unwrap() {
            assert_eq!(round_trip(&m).unwrap(), m);
        }
    }
}
