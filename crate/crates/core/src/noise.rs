//! Stochastic Pauli-trajectory noise calibrated to device medians.
//!
//! Each shot draws a set of Pauli insertions (depolarizing errors after gates,
//! optional idle decay per layer), runs the circuit with those insertions, samples
//! one full-register outcome and flips each measured bit with the readout error
//! probability.
//!
//! Shots in which no gate error fires reuse the noiseless outcome distribution
//! instead of re-simulating. Noisy shots resume from a cached noiseless prefix
//! state at the first insertion. Both shortcuts consume exactly the same random
//! draws as the full simulation, so results are identical with or without them.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::protocol::{decode_outcome_value, Message};
use crate::qstate::{matrices, Cdf, Matrix2, StateVector};

/// Prefix-state caching is skipped above this many bytes of amplitudes.
const PREFIX_CACHE_BUDGET_BYTES: usize = 256 << 20;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("invalid noise model: {0}")]
    InvalidModel(String),
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("circuit acts on {circuit} qubits but {requested} were requested")]
    WidthMismatch { circuit: usize, requested: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("reading noise file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing noise file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Per-gate depolarizing rates, symmetric readout flips and optional idle
/// T1/T2 decay. Defaults are the device medians: 3.044e-4 per single-qubit
/// gate, 2.845e-3 per two-qubit gate, 2.417e-2 readout, T1 185.82 µs and
/// T2 137.24 µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub p_1q: f64,
    pub p_2q: f64,
    pub p_readout: f64,
    pub t1_us: f64,
    pub t2_us: f64,
    pub gate_time_1q_us: f64,
    pub gate_time_2q_us: f64,
    pub idle_decay_enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p_1q: 3.044e-4,
            p_2q: 2.845e-3,
            p_readout: 2.417e-2,
            t1_us: 185.82,
            t2_us: 137.24,
            gate_time_1q_us: 0.05,
            gate_time_2q_us: 0.1,
            idle_decay_enabled: false,
        }
    }
}

impl NoiseModel {
    /// Zero error probabilities and no idle decay.
    pub fn noiseless() -> Self {
        Self {
            p_1q: 0.0,
            p_2q: 0.0,
            p_readout: 0.0,
            idle_decay_enabled: false,
            ..Self::default()
        }
    }

    pub fn readout_only(p_readout: f64) -> Self {
        Self {
            p_readout,
            ..Self::noiseless()
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, p) in [
            ("p_1q", self.p_1q),
            ("p_2q", self.p_2q),
            ("p_readout", self.p_readout),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(NoiseError::InvalidModel(format!(
                    "{name} = {p} not in [0, 1]"
                )));
            }
        }
        for (name, t) in [
            ("t1_us", self.t1_us),
            ("t2_us", self.t2_us),
            ("gate_time_1q_us", self.gate_time_1q_us),
            ("gate_time_2q_us", self.gate_time_2q_us),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(NoiseError::InvalidModel(format!(
                    "{name} = {t} must be positive"
                )));
            }
        }
        if self.t2_us > 2.0 * self.t1_us {
            return Err(NoiseError::InvalidModel(format!(
                "t2_us = {} exceeds 2 * t1_us = {}",
                self.t2_us,
                2.0 * self.t1_us
            )));
        }
        Ok(())
    }

    /// Parses the JSON configuration; absent keys keep their defaults.
    pub fn from_json(text: &str) -> Result<Self, NoiseError> {
        let model: NoiseModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NoiseError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn has_gate_errors(&self) -> bool {
        self.p_1q > 0.0 || self.p_2q > 0.0 || self.idle_decay_enabled
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ORDER: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn matrix(self) -> Option<Matrix2> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(matrices::X),
            Pauli::Y => Some(matrices::Y),
            Pauli::Z => Some(matrices::Z),
        }
    }
}

/// Paulis to apply between gate `slot - 1` and gate `slot` (slot 0 is before
/// the first gate). An insertion after gate `i` has slot `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorInsertion {
    pub slot: usize,
    pub paulis: Vec<(usize, Pauli)>,
}

impl ErrorInsertion {
    fn apply(&self, state: &mut StateVector) {
        for &(q, p) in &self.paulis {
            if let Some(m) = p.matrix() {
                state
                    .apply_single_qubit(&m, q)
                    .expect("insertion qubits come from circuit operands");
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct IdleSite {
    slot: usize,
    qubit: usize,
    p_x: f64,
    p_z: f64,
}

/// Pre-computed error sites for one circuit under one model.
#[derive(Debug, Clone)]
pub struct TrajectorySampler<'a> {
    circuit: &'a Circuit,
    model: &'a NoiseModel,
    idle: Vec<IdleSite>,
}

impl<'a> TrajectorySampler<'a> {
    pub fn new(circuit: &'a Circuit, model: &'a NoiseModel) -> Self {
        let idle = if model.idle_decay_enabled {
            idle_sites(circuit, model)
        } else {
            Vec::new()
        };
        Self {
            circuit,
            model,
            idle,
        }
    }

    /// Clears `out` and fills it with one trajectory's insertions, sorted by slot.
    ///
    /// Draw order per shot: one uniform per gate with nonzero error rate (plus
    /// one Pauli choice when it fires), then for each idle site a Z draw and an
    /// X draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<ErrorInsertion>) {
        out.clear();
        for (i, gate) in self.circuit.gates().iter().enumerate() {
            let mut ops = gate.qubits().iter();
            if gate.is_two_qubit() {
                if self.model.p_2q > 0.0 && rng.gen::<f64>() < self.model.p_2q {
                    let k = rng.gen_range(1..16usize);
                    let (a, b) = (ops.next().unwrap(), ops.next().unwrap());
                    out.push(ErrorInsertion {
                        slot: i + 1,
                        paulis: vec![(a, Pauli::ORDER[k / 4]), (b, Pauli::ORDER[k % 4])],
                    });
                }
            } else if self.model.p_1q > 0.0 && rng.gen::<f64>() < self.model.p_1q {
                let k = rng.gen_range(1..4usize);
                out.push(ErrorInsertion {
                    slot: i + 1,
                    paulis: vec![(ops.next().unwrap(), Pauli::ORDER[k])],
                });
            }
        }
        for site in &self.idle {
            let z = rng.gen::<f64>() < site.p_z;
            let x = rng.gen::<f64>() < site.p_x;
            let mut paulis = Vec::new();
            if z {
                paulis.push((site.qubit, Pauli::Z));
            }
            if x {
                paulis.push((site.qubit, Pauli::X));
            }
            if !paulis.is_empty() {
                out.push(ErrorInsertion {
                    slot: site.slot,
                    paulis,
                });
            }
        }
        if !self.idle.is_empty() {
            out.sort_by_key(|e| e.slot);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<ErrorInsertion> {
        let mut out = Vec::new();
        self.sample_into(rng, &mut out);
        out
    }
}

/// One site per (ASAP layer, qubit). A layer lasts as long as its slowest gate.
/// The Pauli lands right after the qubit's last gate at or before that layer,
/// which commutes with everything up to its next gate.
fn idle_sites(circuit: &Circuit, model: &NoiseModel) -> Vec<IdleSite> {
    let layers = circuit.layers();
    let depth = layers.iter().copied().max().unwrap_or(0);
    let mut duration = vec![0.0f64; depth + 1];
    for (gate, &layer) in circuit.gates().iter().zip(&layers) {
        let t = if gate.is_two_qubit() {
            model.gate_time_2q_us
        } else {
            model.gate_time_1q_us
        };
        duration[layer] = duration[layer].max(t);
    }

    // last_slot[layer][q]: slot after q's last gate with layer <= `layer`.
    let n = circuit.num_qubits();
    let mut last_slot = vec![0usize; n];
    let mut per_layer_slots = vec![Vec::new(); depth + 1];
    let mut by_layer: Vec<Vec<(usize, &Gate)>> = vec![Vec::new(); depth + 1];
    for (i, (gate, &layer)) in circuit.gates().iter().zip(&layers).enumerate() {
        by_layer[layer].push((i, gate));
    }
    for layer in 1..=depth {
        for &(i, gate) in &by_layer[layer] {
            for q in gate.qubits().iter() {
                last_slot[q] = i + 1;
            }
        }
        per_layer_slots[layer] = last_slot.clone();
    }

    let mut sites = Vec::with_capacity(depth * n);
    for layer in 1..=depth {
        let dt = duration[layer];
        let p_z = (1.0 - (-dt / model.t2_us).exp()) / 2.0;
        let p_x = (1.0 - (-dt / model.t1_us).exp()) / 2.0;
        for (qubit, &slot) in per_layer_slots[layer].iter().enumerate() {
            sites.push(IdleSite {
                slot,
                qubit,
                p_x,
                p_z,
            });
        }
    }
    sites
}

pub fn sample_trajectory_errors<R: Rng + ?Sized>(
    circuit: &Circuit,
    model: &NoiseModel,
    rng: &mut R,
) -> Vec<ErrorInsertion> {
    TrajectorySampler::new(circuit, model).sample(rng)
}

/// Outcome histogram. Outcomes are basis indices: bit `k` is qubit `k`'s result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    n: usize,
    counts: BTreeMap<usize, u64>,
    shots: u64,
}

impl ShotCounts {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            counts: BTreeMap::new(),
            shots: 0,
        }
    }

    pub fn record(&mut self, outcome: usize) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Outcome rendered with qubit 0 rightmost.
    pub fn outcome_string(&self, outcome: usize) -> String {
        (0..self.n)
            .rev()
            .map(|k| if (outcome >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Shots whose decoded message equals `expected`.
    pub fn successes(&self, expected: &Message) -> u64 {
        assert_eq!(
            expected.len(),
            self.n,
            "message length must match the measured register"
        );
        let target = expected.value();
        self.iter()
            .filter(|&(outcome, _)| decode_outcome_value(outcome, self.n) == target)
            .map(|(_, c)| c)
            .sum()
    }
}

/// Fraction of shots decoding to `expected`.
pub fn success_rate(counts: &ShotCounts, expected: &Message) -> f64 {
    if counts.shots() == 0 {
        return 0.0;
    }
    counts.successes(expected) as f64 / counts.shots() as f64
}

/// Executes `shots` noisy trajectories of a basis-transpiled circuit from
/// `|0…0⟩`. Deterministic for a fixed `seed`.
pub fn run_noisy(
    circuit: &Circuit,
    n: usize,
    shots: u64,
    model: &NoiseModel,
    seed: u64,
) -> Result<ShotCounts, NoiseError> {
    NoisyRunner::new(circuit, n, model)?.run(shots, seed)
}

/// Holds the per-circuit caches so repeated runs of one circuit share them.
pub struct NoisyRunner<'a> {
    circuit: &'a Circuit,
    model: &'a NoiseModel,
    sampler: TrajectorySampler<'a>,
    noiseless: Cdf,
    /// `prefix[k]` is the noiseless state after the first `k` gates.
    prefix: Option<Vec<StateVector>>,
    fast_path: bool,
}

impl<'a> NoisyRunner<'a> {
    pub fn new(circuit: &'a Circuit, n: usize, model: &'a NoiseModel) -> Result<Self, NoiseError> {
        model.validate()?;
        if circuit.num_qubits() != n {
            return Err(NoiseError::WidthMismatch {
                circuit: circuit.num_qubits(),
                requested: n,
            });
        }
        let mut state = StateVector::new_zero_state(n).map_err(CircuitError::from)?;
        let cache_bytes = (circuit.len() + 1) * (16usize << n);
        let mut prefix = (model.has_gate_errors() && cache_bytes <= PREFIX_CACHE_BUDGET_BYTES)
            .then(|| Vec::with_capacity(circuit.len() + 1));
        for gate in circuit.gates() {
            if let Some(p) = prefix.as_mut() {
                p.push(state.clone());
            }
            gate.apply(&mut state).map_err(CircuitError::from)?;
        }
        let noiseless = Cdf::from_state(&state);
        if let Some(p) = prefix.as_mut() {
            p.push(state);
        }
        Ok(Self {
            circuit,
            model,
            sampler: TrajectorySampler::new(circuit, model),
            noiseless,
            prefix,
            fast_path: true,
        })
    }

    /// With the fast path off every shot is simulated from `|0…0⟩`.
    pub fn with_fast_path(mut self, enabled: bool) -> Self {
        self.fast_path = enabled;
        self
    }

    fn simulate(&self, errors: &[ErrorInsertion]) -> StateVector {
        let (mut state, start) = match (&self.prefix, errors.first()) {
            (Some(prefix), Some(first)) if self.fast_path => {
                (prefix[first.slot].clone(), first.slot)
            }
            _ => (
                StateVector::new_zero_state(self.circuit.num_qubits()).expect("validated width"),
                0,
            ),
        };
        let gates = self.circuit.gates();
        let mut pending = errors.iter().peekable();
        for slot in start..=gates.len() {
            while let Some(e) = pending.next_if(|e| e.slot == slot) {
                e.apply(&mut state);
            }
            if let Some(g) = gates.get(slot) {
                g.apply(&mut state).expect("validated circuit");
            }
        }
        state
    }

    pub fn run(&self, shots: u64, seed: u64) -> Result<ShotCounts, NoiseError> {
        if shots == 0 {
            return Err(NoiseError::ZeroShots);
        }
        let n = self.circuit.num_qubits();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = ShotCounts::new(n);
        let mut errors = Vec::new();
        for _ in 0..shots {
            self.sampler.sample_into(&mut rng, &mut errors);
            let u: f64 = rng.gen();
            let mut outcome = if errors.is_empty() && self.fast_path {
                self.noiseless.sample_with(u)
            } else {
                Cdf::from_state(&self.simulate(&errors)).sample_with(u)
            };
            if self.model.p_readout > 0.0 {
                for q in 0..n {
                    if rng.gen::<f64>() < self.model.p_readout {
                        outcome ^= 1 << q;
                    }
                }
            }
            counts.record(outcome);
        }
        Ok(counts)
    }
}
