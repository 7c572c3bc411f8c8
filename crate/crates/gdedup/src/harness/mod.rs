//! Monte Carlo experiment engine.
//!
//! A run streams `C_max` chunks from a seeded source through the
//! generalized and classic coders in lockstep, recording cumulative coded
//! lengths at selected chunk counts, and averages those across trials. The
//! resulting table carries the analytical bound columns alongside the
//! simulated means, plus an optional DEFLATE baseline for comparison.
//!
//! Reproducibility rules:
//!
//! * the active base set is sampled once per experiment from the source
//!   seed and shared by every trial;
//! * trial `t` (1-based) draws its chunks from a fresh rng seeded with
//!   `seed + t`;
//! * per-point accumulation sums integer bit counts before any division,
//!   so parallel trial scheduling cannot change the output.

mod csv;
mod plot;

pub use csv::{export_csv, parse_csv, table_to_csv_string};
pub use plot::emit_plot;

use std::io::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::analysis::ThetaAccumulator;
use crate::bitstream::BitWriter;
use crate::code::{CodeSpec, KMode};
use crate::codec::StreamEncoder;
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::source::SourceConfig;

/// Configuration of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: SourceConfig,
    /// Chunks per trial.
    pub c_max: u64,
    pub trials: u64,
    /// Base representation used by the generalized coder.
    pub k_mode: KMode,
    /// Record a DEFLATE-compressed length of the raw chunk prefix as well.
    pub baseline: bool,
    /// Chunk counts at which to record, ascending, within `1..=c_max`.
    pub record_points: Vec<u64>,
}

impl ExperimentConfig {
    pub fn new(source: SourceConfig, c_max: u64, trials: u64) -> Self {
        let record_points = default_record_points(c_max);
        Self { source, c_max, trials, k_mode: KMode::Full, baseline: false, record_points }
    }

    fn validate(&self) -> Result<()> {
        if self.c_max < 1 || self.trials < 1 {
            return Err(Error::InvalidParams("c_max and trials must be at least 1"));
        }
        let points = &self.record_points;
        if points.is_empty()
            || points.windows(2).any(|w| w[0] >= w[1])
            || points[0] < 1
            || *points.last().unwrap() > self.c_max
        {
            return Err(Error::InvalidParams(
                "record points must be ascending within 1..=c_max",
            ));
        }
        Ok(())
    }
}

/// Every chunk count up to 256, then powers of two, then `c_max` itself.
pub fn default_record_points(c_max: u64) -> Vec<u64> {
    let mut points: Vec<u64> = (1..=c_max.min(256)).collect();
    let mut p = 512u64;
    while p <= c_max {
        points.push(p);
        p *= 2;
    }
    if *points.last().unwrap() != c_max {
        points.push(c_max);
    }
    points
}

/// One recorded row. Lengths are mean bits over trials; `delta_*` are the
/// means' adjacent differences (present when the previous chunk count was
/// also recorded; at `C = 1` the difference is against the empty stream).
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub c: u64,
    pub mean_len_gen: f64,
    pub mean_len_classic: f64,
    pub delta_gen: Option<f64>,
    pub delta_classic: Option<f64>,
    /// `mean_len_classic / mean_len_gen`, the plug-in estimate of the
    /// generalization ratio (a ratio of averaged lengths, not an average
    /// of per-trial ratios).
    pub ratio: f64,
    pub theta_l_gen: f64,
    pub theta_u_gen: f64,
    pub theta_l_classic: f64,
    /// Already includes the classic tightening: `theta_U(Z, 0) - C`.
    pub theta_u_classic: f64,
    pub baseline_len: Option<f64>,
    /// Standard errors of the two means (not exported to CSV).
    pub se_gen: f64,
    pub se_classic: f64,
}

/// Experiment metadata echoed into CSV headers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentMeta {
    pub m: u32,
    pub active: u64,
    pub k_mode: KMode,
    pub trials: u64,
    pub seed: u64,
    pub bases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub meta: ExperimentMeta,
    pub rows: Vec<Row>,
}

#[derive(Clone)]
struct PointSums {
    gen: Vec<u64>,
    gen_sq: Vec<u128>,
    classic: Vec<u64>,
    classic_sq: Vec<u128>,
    baseline: Vec<u64>,
}

impl PointSums {
    fn zero(points: usize) -> Self {
        Self {
            gen: vec![0; points],
            gen_sq: vec![0; points],
            classic: vec![0; points],
            classic_sq: vec![0; points],
            baseline: vec![0; points],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.gen.iter_mut().zip(other.gen) {
            *a += b;
        }
        for (a, b) in self.gen_sq.iter_mut().zip(other.gen_sq) {
            *a += b;
        }
        for (a, b) in self.classic.iter_mut().zip(other.classic) {
            *a += b;
        }
        for (a, b) in self.classic_sq.iter_mut().zip(other.classic_sq) {
            *a += b;
        }
        for (a, b) in self.baseline.iter_mut().zip(other.baseline) {
            *a += b;
        }
        self
    }
}

/// Runs the experiment: trials in parallel, integer accumulation, bound
/// columns attached. Deterministic for a fixed configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    cfg.validate()?;
    let source = &cfg.source;
    let gen_spec = match source.spec().m() {
        Some(m) => CodeSpec::hamming(m, cfg.k_mode)?,
        None => *source.spec(),
    };
    let n = source.spec().n();
    let points = &cfg.record_points;
    let baseline_failed = AtomicBool::new(false);

    let sums = (1..=cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = DetRng::new(source.seed().wrapping_add(trial));
            let mut sums = PointSums::zero(points.len());
            let mut gen = StreamEncoder::generalized(gen_spec);
            let mut classic = StreamEncoder::classic(n).expect("validated length");
            let mut raw = if cfg.baseline { Some(BitWriter::new()) } else { None };
            let mut next_point = 0usize;
            for c in 1..=cfg.c_max {
                let chunk = source.sample_chunk(&mut rng);
                gen.push(&chunk).expect("sampled chunks fit the spec");
                classic.push(&chunk).expect("sampled chunks fit the spec");
                if let Some(w) = raw.as_mut() {
                    chunk.write_to(w).expect("chunk packing cannot overflow");
                }
                if next_point < points.len() && points[next_point] == c {
                    sums.gen[next_point] = gen.emitted_bits();
                    sums.gen_sq[next_point] = u128::from(gen.emitted_bits()).pow(2);
                    sums.classic[next_point] = classic.emitted_bits();
                    sums.classic_sq[next_point] = u128::from(classic.emitted_bits()).pow(2);
                    if let Some(w) = raw.as_ref() {
                        match deflate_baseline(&w.to_padded_bytes()) {
                            Ok(bits) => sums.baseline[next_point] = bits,
                            Err(_) => baseline_failed.store(true, Ordering::Relaxed),
                        }
                    }
                    next_point += 1;
                }
            }
            sums
        })
        .reduce(|| PointSums::zero(points.len()), PointSums::merge);

    let baseline_ok = cfg.baseline && !baseline_failed.load(Ordering::Relaxed);
    if cfg.baseline && !baseline_ok {
        eprintln!("warning: DEFLATE baseline failed; column omitted");
    }

    // Bound series in one pass over 1..=c_max.
    let mut gen_acc =
        ThetaAccumulator::new(source.x_size(), source.spec().y_size(), gen_spec.k() as u32);
    let mut classic_acc = ThetaAccumulator::new(source.z_size(), 1, n as u32);
    let mut theta = Vec::with_capacity(points.len());
    let mut next_point = 0usize;
    for c in 1..=cfg.c_max {
        let g = gen_acc.step();
        let d = classic_acc.step();
        if next_point < points.len() && points[next_point] == c {
            theta.push((g.0, g.1, d.0, d.1 - c as f64));
            next_point += 1;
        }
    }

    let trials = cfg.trials;
    let mean_and_se = |sum: u64, sum_sq: u128| -> (f64, f64) {
        let mean = sum as f64 / trials as f64;
        if trials < 2 {
            return (mean, 0.0);
        }
        // T * sum(x^2) - (sum x)^2 is exact in integers and never negative;
        // SE^2 = that / (T^2 (T - 1)).
        let var_num = u128::from(trials) * sum_sq - u128::from(sum).pow(2);
        let t = trials as f64;
        (mean, (var_num as f64 / (t * t * (t - 1.0))).sqrt())
    };

    let mut rows: Vec<Row> = Vec::with_capacity(points.len());
    for (i, &c) in points.iter().enumerate() {
        let (mean_len_gen, se_gen) = mean_and_se(sums.gen[i], sums.gen_sq[i]);
        let (mean_len_classic, se_classic) = mean_and_se(sums.classic[i], sums.classic_sq[i]);
        let prev = if c == 1 {
            // The empty stream has length zero.
            Some((0.0, 0.0))
        } else if i > 0 && points[i - 1] == c - 1 {
            Some((rows[i - 1].mean_len_gen, rows[i - 1].mean_len_classic))
        } else {
            None
        };
        let (delta_gen, delta_classic) = match prev {
            Some((pg, pc)) => (Some(mean_len_gen - pg), Some(mean_len_classic - pc)),
            None => (None, None),
        };
        let (theta_l_gen, theta_u_gen, theta_l_classic, theta_u_classic) = theta[i];
        rows.push(Row {
            c,
            mean_len_gen,
            mean_len_classic,
            delta_gen,
            delta_classic,
            ratio: mean_len_classic / mean_len_gen,
            theta_l_gen,
            theta_u_gen,
            theta_l_classic,
            theta_u_classic,
            baseline_len: baseline_ok.then(|| sums.baseline[i] as f64 / trials as f64),
            se_gen,
            se_classic,
        });
    }

    Ok(ExperimentTable {
        meta: ExperimentMeta {
            m: source.spec().m().unwrap_or(0),
            active: source.x_size(),
            k_mode: cfg.k_mode,
            trials,
            seed: source.seed(),
            bases: source.bases().iter().map(|b| b.to_string()).collect(),
        },
        rows,
    })
}

/// Compresses bytes with raw DEFLATE (RFC 1951) at maximum effort and
/// returns the output length in bits.
pub fn deflate_baseline(packed: &[u8]) -> Result<u64> {
    let mut enc =
        flate2::write::DeflateEncoder::new(Vec::new(), flate2::Compression::best());
    enc.write_all(packed).map_err(|e| Error::Baseline(e.to_string()))?;
    let out = enc.finish().map_err(|e| Error::Baseline(e.to_string()))?;
    Ok(out.len() as u64 * 8)
}

/// One result of a chunk-length sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub m: u32,
    pub n: u32,
    /// Largest generalization ratio over the recorded chunk counts.
    pub max_ratio: f64,
    /// The chunk count where it occurred.
    pub argmax_c: u64,
}

/// Reruns the experiment for each `m` with a fixed active base count and
/// reports where the generalization ratio peaks.
pub fn sweep_chunk_length(
    m_values: &[u32],
    active: u64,
    trials: u64,
    c_max: u64,
    seed: u64,
    k_mode: KMode,
) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let source = crate::source::build_source(m, active, seed)?;
        let mut cfg = ExperimentConfig::new(source, c_max, trials);
        cfg.k_mode = k_mode;
        let table = run_experiment(&cfg)?;
        let best = table
            .rows
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .expect("at least one record point");
        out.push(SweepRecord {
            m,
            n: (1u32 << m) - 1,
            max_ratio: best.ratio,
            argmax_c: best.c,
        });
    }
    Ok(out)
}
