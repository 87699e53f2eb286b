//! Message sweeps and the aggregations behind the success-rate analyses.

mod report;

pub use report::{
    read_report, read_report_file, write_aggregates, write_report, write_report_file,
    write_zero_fraction, ReportError, AGGREGATE_HEADER, SWEEP_HEADER, ZERO_FRACTION_HEADER,
};

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{cancel_adjacent_pairs, transpile_to_basis};
use crate::noise::{NoiseError, NoiseModel, NoisyRunner};
use crate::protocol::{build_full, Message, ProtocolError};

/// Shots per circuit in the reference experiment.
pub const DEFAULT_SHOTS: u64 = 4096;
/// Message lengths of the reference experiment.
pub const DEFAULT_LENGTHS: [usize; 4] = [4, 6, 8, 10];
/// Largest `n` for which a full `2^n` sweep is allowed.
pub const MAX_SWEEP_BITS: usize = 12;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("full sweeps are limited to 2..={MAX_SWEEP_BITS} bits, got {0}")]
    ResourceGuard(usize),
    #[error("no records to aggregate")]
    Empty,
    #[error("records mix message lengths {0} and {1}")]
    MixedLengths(usize, usize),
    #[error("sweep for n = {n} is incomplete: {found} of {expected} messages")]
    IncompleteSweep {
        n: usize,
        found: usize,
        expected: usize,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Outcome of running one message's protocol circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub message: Message,
    pub encoder_gates_raw: usize,
    pub total_gates_transpiled: usize,
    pub depth_transpiled: usize,
    pub shots: u64,
    pub successes: u64,
    pub seed: u64,
}

impl SweepRecord {
    pub fn decimal_value(&self) -> u64 {
        self.message.value()
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }
}

/// Options shared by single runs and sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub shots: u64,
    pub model: NoiseModel,
    /// Apply the self-inverse cancellation pass after transpiling.
    pub cancel_pairs: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            model: NoiseModel::default(),
            cancel_pairs: false,
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-message seed, independent of scheduling order.
pub fn derive_seed(master_seed: u64, n: usize, decimal_value: u64) -> u64 {
    mix64(mix64(mix64(master_seed) ^ n as u64) ^ decimal_value)
}

/// Builds, transpiles and runs one message with an explicit seed.
pub fn run_message(
    message: &Message,
    settings: &RunSettings,
    seed: u64,
) -> Result<(SweepRecord, crate::noise::ShotCounts), ExperimentError> {
    let pc = build_full(message)?;
    let mut circuit = transpile_to_basis(&pc.full);
    if settings.cancel_pairs {
        circuit = cancel_adjacent_pairs(&circuit);
    }
    let counts = NoisyRunner::new(&circuit, pc.n, &settings.model)?.run(settings.shots, seed)?;
    let record = SweepRecord {
        n: pc.n,
        message: message.clone(),
        encoder_gates_raw: pc.stage2.len(),
        total_gates_transpiled: circuit.len(),
        depth_transpiled: circuit.depth(),
        shots: settings.shots,
        successes: counts.successes(message),
        seed,
    };
    Ok((record, counts))
}

/// Runs every `n`-bit message, in increasing decimal order. Messages run in
/// parallel on the current rayon pool; results do not depend on scheduling.
pub fn sweep(
    n: usize,
    settings: &RunSettings,
    master_seed: u64,
) -> Result<Vec<SweepRecord>, ExperimentError> {
    if !(2..=MAX_SWEEP_BITS).contains(&n) {
        return Err(ExperimentError::ResourceGuard(n));
    }
    if settings.shots == 0 {
        return Err(NoiseError::ZeroShots.into());
    }
    (0..1u64 << n)
        .into_par_iter()
        .map(|value| {
            let message = Message::from_value(value, n)?;
            let seed = derive_seed(master_seed, n, value);
            run_message(&message, settings, seed).map(|(r, _)| r)
        })
        .collect()
}

pub fn sweep_all(
    n: usize,
    shots: u64,
    model: &NoiseModel,
    master_seed: u64,
) -> Result<Vec<SweepRecord>, ExperimentError> {
    let settings = RunSettings {
        shots,
        model: model.clone(),
        cancel_pairs: false,
    };
    sweep(n, &settings, master_seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKey {
    GateCount,
    Depth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub group_key: usize,
    pub num_messages: usize,
    pub mean_success_rate: f64,
    pub min_success_rate: f64,
    pub max_success_rate: f64,
}

fn uniform_n(records: &[SweepRecord]) -> Result<usize, ExperimentError> {
    let first = records.first().ok_or(ExperimentError::Empty)?.n;
    match records.iter().find(|r| r.n != first) {
        Some(r) => Err(ExperimentError::MixedLengths(first, r.n)),
        None => Ok(first),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Groups by transpiled gate count or transpiled depth, ascending.
pub fn aggregate_by(
    records: &[SweepRecord],
    key: GroupKey,
) -> Result<Vec<AggregateRow>, ExperimentError> {
    uniform_n(records)?;
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        let k = match key {
            GroupKey::GateCount => r.total_gates_transpiled,
            GroupKey::Depth => r.depth_transpiled,
        };
        groups.entry(k).or_default().push(r.success_rate());
    }
    Ok(groups
        .into_iter()
        .map(|(group_key, rates)| AggregateRow {
            group_key,
            num_messages: rates.len(),
            mean_success_rate: mean(&rates),
            min_success_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
            max_success_rate: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect())
}

/// Share of '0' digits in a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZeroClass {
    AllZeros,
    HalfZeros,
    NoZeros,
}

impl ZeroClass {
    pub const ALL: [ZeroClass; 3] = [
        ZeroClass::AllZeros,
        ZeroClass::HalfZeros,
        ZeroClass::NoZeros,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ZeroClass::AllZeros => "100%",
            ZeroClass::HalfZeros => "50%",
            ZeroClass::NoZeros => "0%",
        }
    }

    pub fn of(message: &Message) -> Option<ZeroClass> {
        let zeros = message.count_zeros();
        let n = message.len();
        if zeros == n {
            Some(ZeroClass::AllZeros)
        } else if zeros == 0 {
            Some(ZeroClass::NoZeros)
        } else if 2 * zeros == n {
            Some(ZeroClass::HalfZeros)
        } else {
            None
        }
    }
}

impl fmt::Display for ZeroClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFractionRow {
    pub n: usize,
    pub class: ZeroClass,
    pub num_messages: usize,
    pub mean_success_rate: f64,
}

/// Mean success rate per zero-fraction class for each message length present.
/// The 50% class averages every balanced message and exists only for even `n`.
/// Each length must be a complete `2^n` sweep.
pub fn zero_fraction_analysis(
    records: &[SweepRecord],
) -> Result<Vec<ZeroFractionRow>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::Empty);
    }
    let mut by_n: BTreeMap<usize, BTreeMap<u64, &SweepRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().insert(r.decimal_value(), r);
    }
    let mut rows = Vec::new();
    for (n, recs) in by_n {
        let expected = 1usize << n;
        if recs.len() != expected {
            return Err(ExperimentError::IncompleteSweep {
                n,
                found: recs.len(),
                expected,
            });
        }
        for class in ZeroClass::ALL {
            let rates: Vec<f64> = recs
                .values()
                .filter(|r| ZeroClass::of(&r.message) == Some(class))
                .map(|r| r.success_rate())
                .collect();
            if rates.is_empty() {
                continue;
            }
            rows.push(ZeroFractionRow {
                n,
                class,
                num_messages: rates.len(),
                mean_success_rate: mean(&rates),
            });
        }
    }
    Ok(rows)
}

/// Ranks starting at 1, ties sharing their average rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// `None` when either side is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
