//! Monte Carlo sweep over input power and architectures, plus tabular
//! output.
//!
//! Trials are independent work units: trial `t` derives its generator
//! from the master seed and `t` alone (a dedicated ChaCha stream), so
//! adding or removing architectures never changes the channels the
//! remaining architectures see. Trials run in parallel; aggregation
//! walks them in trial order so results are byte-identical run to run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::str::FromStr;

use crate::arch::ArchitectureKind;
use crate::channel::{generate_channel, sample_paths};
use crate::config::{ExperimentConfig, Normalization, SweepSetup};
use crate::error::{Error, Result};
use crate::metrics::spectral_efficiency;
use crate::power::{component_loss, power_consumption, transmit_power_from_input};
use crate::precoder::design_precoders;

/// Aggregated results for one (architecture, input power) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub arch: ArchitectureKind,
    pub p_in_w: f64,
    /// Mean spectral efficiency over trials, summed over subcarriers.
    pub se_bps_hz: f64,
    /// The same mean divided by the subcarrier count.
    pub se_per_subcarrier: f64,
    /// Mean spectral efficiency over consumed power.
    pub ee_bps_hz_per_w: f64,
    /// Consumed power at this operating point (trial-independent).
    pub p_cons_w: f64,
    pub loss_db: f64,
    pub n_trials: usize,
    pub seed: u64,
    /// Per-trial spectral efficiencies, in trial order. Not emitted to
    /// tables; kept for paired statistics.
    pub trial_se: Vec<f64>,
    /// Trials whose channel draw was degenerate (zero precoder).
    pub degenerate_trials: usize,
}

impl SweepRow {
    /// Standard error of the mean spectral efficiency.
    pub fn se_stderr(&self) -> f64 {
        let n = self.trial_se.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.se_bps_hz;
        let var = self
            .trial_se
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        (var / n as f64).sqrt()
    }
}

/// All rows of a sweep, sorted by (architecture label, input power).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub n_subcarriers: usize,
}

impl SweepResult {
    pub fn row(&self, arch: ArchitectureKind, p_in_w: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.arch == arch && r.p_in_w == p_in_w)
    }
}

/// Runs the configured sweep: per trial one shared channel realization,
/// then every architecture designed and measured at every grid point.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let setup = config.build()?;
    run_sweep_with_setup(config, &setup)
}

fn run_sweep_with_setup(config: &ExperimentConfig, setup: &SweepSetup) -> Result<SweepResult> {
    let n_archs = setup.archs.len();
    let n_powers = setup.power_grid.len();

    // loss and transmit power are channel-independent
    let loss_db: Vec<f64> = setup
        .archs
        .iter()
        .map(|a| component_loss(&a.spec, &setup.catalog))
        .collect();
    let transmit: Vec<Vec<f64>> = (0..n_archs)
        .map(|ai| {
            setup
                .power_grid
                .iter()
                .map(|p_in| transmit_power_from_input(*p_in, loss_db[ai]))
                .collect()
        })
        .collect();

    struct TrialOutcome {
        se: Vec<f64>,         // arch-major, then power
        degenerate: Vec<bool>, // same layout
    }

    let trials: Vec<TrialOutcome> = (0..setup.n_trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialOutcome> {
            let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
            rng.set_stream(trial as u64);
            let paths = sample_paths(setup.n_paths, &setup.pulse, &mut rng)?;
            let mut channel = generate_channel(&paths, &setup.geometry, &setup.pulse)?;
            if setup.normalization == Normalization::Strict {
                let target = (setup.geometry.n_radiators() * setup.geometry.n_rx) as f64;
                channel.rescale_to_mean_sq(target);
            }
            let mut se = vec![0.0; n_archs * n_powers];
            let mut degenerate = vec![false; n_archs * n_powers];
            for (ai, arch) in setup.archs.iter().enumerate() {
                for pi in 0..n_powers {
                    let designed = design_precoders(
                        &channel,
                        &arch.spec,
                        arch.dma.as_ref(),
                        transmit[ai][pi],
                        setup.noise_var,
                        setup.power_mode,
                    )?;
                    se[ai * n_powers + pi] =
                        spectral_efficiency(&channel, &designed.effective, setup.noise_var)?;
                    degenerate[ai * n_powers + pi] = designed.degenerate;
                }
            }
            Ok(TrialOutcome { se, degenerate })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(n_archs * n_powers);
    for (ai, arch) in setup.archs.iter().enumerate() {
        for pi in 0..n_powers {
            let trial_se: Vec<f64> = trials.iter().map(|t| t.se[ai * n_powers + pi]).collect();
            let degenerate_trials = trials
                .iter()
                .filter(|t| t.degenerate[ai * n_powers + pi])
                .count();
            let mean = trial_se.iter().sum::<f64>() / trial_se.len() as f64;
            let p_cons = power_consumption(&arch.spec, &setup.catalog, transmit[ai][pi]).total;
            rows.push(SweepRow {
                arch: arch.spec.kind,
                p_in_w: setup.power_grid[pi],
                se_bps_hz: mean,
                se_per_subcarrier: mean / config.n_subcarriers as f64,
                ee_bps_hz_per_w: mean / p_cons,
                p_cons_w: p_cons,
                loss_db: loss_db[ai],
                n_trials: setup.n_trials,
                seed: setup.seed,
                trial_se,
                degenerate_trials,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.arch
            .label()
            .cmp(b.arch.label())
            .then(a.p_in_w.partial_cmp(&b.p_in_w).unwrap())
    });
    Ok(SweepResult {
        rows,
        n_subcarriers: config.n_subcarriers,
    })
}

/// Table formats understood by `emit_results`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" | "jsonl" => Ok(OutputFormat::JsonLines),
            other => Err(Error::Config(format!(
                "format: expected 'csv' or 'json-lines', got '{other}'"
            ))),
        }
    }
}

/// Output options for `emit_results`.
#[derive(Debug, Clone, Copy)]
pub struct EmitOptions {
    pub format: OutputFormat,
    /// Append the standard-error column.
    pub include_stderr: bool,
}

impl Default for EmitOptions {
    fn default() -> Self {
        Self {
            format: OutputFormat::Csv,
            include_stderr: false,
        }
    }
}

#[derive(Serialize)]
struct RowRecord<'a> {
    arch: &'a str,
    p_in_w: f64,
    se_bps_hz: f64,
    se_per_subcarrier: f64,
    ee_bps_hz_per_w: f64,
    p_cons_w: f64,
    loss_db: f64,
    n_trials: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    se_stderr_bps_hz: Option<f64>,
}

/// Writes the sweep table. Floats are written in shortest round-trip
/// form, so parsing the file back reproduces the in-memory values
/// exactly.
pub fn emit_results(
    result: &SweepResult,
    options: &EmitOptions,
    out: &mut dyn Write,
) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::InvalidDimension("empty sweep result".into()));
    }
    match options.format {
        OutputFormat::Csv => {
            let mut header =
                "arch,p_in_w,se_bps_hz,se_per_subcarrier,ee_bps_hz_per_w,p_cons_w,loss_db,n_trials,seed"
                    .to_string();
            if options.include_stderr {
                header.push_str(",se_stderr_bps_hz");
            }
            writeln!(out, "{header}")?;
            for r in &result.rows {
                write!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.arch.label(),
                    r.p_in_w,
                    r.se_bps_hz,
                    r.se_per_subcarrier,
                    r.ee_bps_hz_per_w,
                    r.p_cons_w,
                    r.loss_db,
                    r.n_trials,
                    r.seed
                )?;
                if options.include_stderr {
                    write!(out, ",{}", r.se_stderr())?;
                }
                writeln!(out)?;
            }
        }
        OutputFormat::JsonLines => {
            for r in &result.rows {
                let record = RowRecord {
                    arch: r.arch.label(),
                    p_in_w: r.p_in_w,
                    se_bps_hz: r.se_bps_hz,
                    se_per_subcarrier: r.se_per_subcarrier,
                    ee_bps_hz_per_w: r.ee_bps_hz_per_w,
                    p_cons_w: r.p_cons_w,
                    loss_db: r.loss_db,
                    n_trials: r.n_trials,
                    seed: r.seed,
                    se_stderr_bps_hz: options.include_stderr.then(|| r.se_stderr()),
                };
                let line = serde_json::to_string(&record)
                    .map_err(|e| Error::Config(format!("serialization: {e}")))?;
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

/// Convenience wrapper writing straight to a file path.
pub fn write_results_file(
    result: &SweepResult,
    options: &EmitOptions,
    path: &std::path::Path,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    emit_results(result, options, &mut file)?;
    file.flush()?;
    Ok(())
}
