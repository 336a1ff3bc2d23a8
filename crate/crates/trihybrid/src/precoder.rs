//! Per-architecture precoder design.
//!
//! Every architecture is designed in one decoupled pass. DMA feeds get
//! Lorentzian beamformers mapped from the principal eigenvectors of
//! their per-feed channel covariances; the analog stage (when present)
//! is designed on the channel reduced by the stages before it; the
//! digital stage always comes last and waterfills over the eigenmodes of
//! the fully reduced channel.
//!
//! The digital stage is computed in a whitened coordinate system: with
//! `G` the product of the fixed stages and `T = (G^H G)^{1/2}`, the
//! waterfilling runs on `H G T^{-1}` and the result is mapped back with
//! `T^{-1}`. This makes the radiated (antenna-output) power of the
//! composite equal the waterfilling budget exactly, so the optimization
//! and the power constraint agree instead of needing a post-hoc rescale.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analog::{
    design_analog_fully_connected, design_analog_partially_connected, AnalogPrecoder,
};
use crate::arch::{ArchitectureKind, ArchitectureSpec};
use crate::channel::ChannelRealization;
use crate::covariance::{principal_eigenvector, subarray_covariance};
use crate::digital::design_digital_precoder;
use crate::dma::{assemble_dma_precoder, lorentzian_map, waveguide_coefficients, DmaModel, DmaPrecoder};
use crate::error::{Error, Result};
use crate::Complex64;

/// Where the transmit power budget is enforced: at the antenna input
/// ports (before the electromagnetic stage) or at the radiating outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerConstraintMode {
    /// Constrain the Frobenius power of `F_ana F_dig[k]`.
    #[serde(rename = "aip")]
    AntennaInput,
    /// Constrain the Frobenius power of the full composite (default).
    #[serde(rename = "aop")]
    AntennaOutput,
}

impl std::str::FromStr for PowerConstraintMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aip" => Ok(PowerConstraintMode::AntennaInput),
            "aop" => Ok(PowerConstraintMode::AntennaOutput),
            other => Err(Error::Config(format!(
                "power_mode: expected 'aip' or 'aop', got '{other}'"
            ))),
        }
    }
}

/// The designed three-stage precoder and its per-subcarrier composite.
#[derive(Debug, Clone, PartialEq)]
pub struct TriHybridPrecoder {
    /// Digital precoders, one `n_rf x n_s` matrix per subcarrier.
    pub digital: Vec<DMatrix<Complex64>>,
    /// Analog stage; an identity placeholder when the architecture has
    /// no phase-shifter network.
    pub analog: AnalogPrecoder,
    /// Electromagnetic stage, present only for DMA architectures.
    pub dma: Option<DmaPrecoder>,
    /// Composite `F_dma F_ana F_dig[k]`, one `n_rad x n_s` matrix per
    /// subcarrier.
    pub effective: Vec<DMatrix<Complex64>>,
    /// Set when the channel was degenerate (zero) and the digital stage
    /// is all-zero.
    pub degenerate: bool,
}

impl TriHybridPrecoder {
    /// Antenna-input power: total Frobenius power of `F_ana F_dig[k]`.
    pub fn input_norm_sq(&self) -> f64 {
        self.digital
            .iter()
            .map(|d| (&self.analog.matrix * d).norm_squared())
            .sum()
    }

    /// Antenna-output power: total Frobenius power of the composite.
    pub fn output_norm_sq(&self) -> f64 {
        self.effective.iter().map(|f| f.norm_squared()).sum()
    }

    fn norm_sq(&self, mode: PowerConstraintMode) -> f64 {
        match mode {
            PowerConstraintMode::AntennaInput => self.input_norm_sq(),
            PowerConstraintMode::AntennaOutput => self.output_norm_sq(),
        }
    }
}

/// Hermitian square root and pseudo-inverse square root of `G^H G`.
fn whitening_pair(g: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let gram = g.adjoint() * g;
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = gram.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = lam_max * 1e-12;
    let mut sqrt = DMatrix::<Complex64>::zeros(n, n);
    let mut inv_sqrt = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let lam = eig.eigenvalues[i].max(0.0);
        let v = eig.eigenvectors.column(i);
        let outer = &v * v.adjoint();
        if lam > floor && lam > 0.0 {
            sqrt += &outer * Complex64::new(lam.sqrt(), 0.0);
            inv_sqrt += &outer * Complex64::new(1.0 / lam.sqrt(), 0.0);
        }
    }
    (sqrt, inv_sqrt)
}

/// Designs the digital stage behind a fixed front matrix `g`
/// (`F_dma F_ana`, or identity slices of it), returning the digital
/// precoders expressed at the RF ports.
fn digital_behind(
    channel: &ChannelRealization,
    g: &DMatrix<Complex64>,
    n_streams: usize,
    total_power: f64,
    noise_var: f64,
) -> Result<(Vec<DMatrix<Complex64>>, bool)> {
    let (_, inv_sqrt) = whitening_pair(g);
    let effective: Vec<DMatrix<Complex64>> = channel
        .per_subcarrier
        .iter()
        .map(|h| h * g * &inv_sqrt)
        .collect();
    let designed = design_digital_precoder(&effective, n_streams, total_power, noise_var)?;
    let digital = designed
        .per_subcarrier
        .iter()
        .map(|f| &inv_sqrt * f)
        .collect();
    Ok((digital, designed.degenerate))
}

/// Builds the per-feed Lorentzian DMA beamformers from the raw channel's
/// feed covariances.
fn design_dma_stage(
    channel: &ChannelRealization,
    spec: &ArchitectureSpec,
    model: &DmaModel,
) -> Result<DmaPrecoder> {
    let slots = spec.slots_per_feed();
    let eta = waveguide_coefficients(model);
    let mut beams = Vec::with_capacity(spec.n_t);
    for feed in 0..spec.n_t {
        let cov = subarray_covariance(channel, feed * slots..(feed + 1) * slots)?;
        let pc = principal_eigenvector(&cov);
        beams.push(lorentzian_map(&pc.vector, &eta)?);
    }
    assemble_dma_precoder(beams)
}

/// Designs all stages for one architecture and enforces the power budget
/// in the requested mode.
pub fn design_precoders(
    channel: &ChannelRealization,
    spec: &ArchitectureSpec,
    dma: Option<&DmaModel>,
    total_power: f64,
    noise_var: f64,
    mode: PowerConstraintMode,
) -> Result<TriHybridPrecoder> {
    spec.validate()?;
    if channel.n_radiators() != spec.radiating_elements() {
        return Err(Error::InvalidDimension(format!(
            "{}: channel has {} radiators, architecture expects {}",
            spec.kind,
            channel.n_radiators(),
            spec.radiating_elements()
        )));
    }
    if !(total_power.is_finite() && total_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "total_power must be positive, got {total_power}"
        )));
    }

    let model = if spec.kind.uses_dma() {
        let m = dma.ok_or_else(|| {
            Error::InvalidParameter(format!("{} requires a DMA model", spec.kind))
        })?;
        if m.n_unit_cells != spec.n_uc || m.n_dma_per_feed != spec.m_dma {
            return Err(Error::InvalidDimension(format!(
                "{}: DMA model is {} cells x {} per feed, architecture expects {} x {}",
                spec.kind, m.n_unit_cells, m.n_dma_per_feed, spec.n_uc, spec.m_dma
            )));
        }
        Some(m)
    } else {
        None
    };

    let (dma_precoder, analog) = match spec.kind {
        ArchitectureKind::Do | ArchitectureKind::Dh => {
            let d = design_dma_stage(channel, spec, model.unwrap())?;
            (Some(d), AnalogPrecoder::identity(spec.n_t))
        }
        ArchitectureKind::Th => {
            let d = design_dma_stage(channel, spec, model.unwrap())?;
            // analog stage sees the channel through the DMA
            let reduced = ChannelRealization {
                per_subcarrier: channel
                    .per_subcarrier
                    .iter()
                    .map(|h| h * &d.matrix)
                    .collect(),
                n_paths: channel.n_paths,
            };
            let ana = design_analog_partially_connected(&reduced, spec.n_rf)?;
            (Some(d), ana)
        }
        ArchitectureKind::A => {
            // one phase shifter per antenna, driven by a single chain
            let cov = subarray_covariance(channel, 0..spec.n_t)?;
            let pc = principal_eigenvector(&cov);
            let scale = 1.0 / (spec.n_t as f64).sqrt();
            let matrix = DMatrix::from_fn(spec.n_t, 1, |m, _| {
                Complex64::from_polar(scale, pc.vector[m].arg())
            });
            (
                None,
                AnalogPrecoder {
                    matrix,
                    connectivity: crate::analog::Connectivity::FullyConnected,
                },
            )
        }
        ArchitectureKind::Hp => (None, design_analog_partially_connected(channel, spec.n_rf)?),
        ArchitectureKind::Hf => (None, design_analog_fully_connected(channel, spec.n_rf)?),
        ArchitectureKind::Fd => (None, AnalogPrecoder::identity(spec.n_t)),
    };

    let front = match &dma_precoder {
        Some(d) => &d.matrix * &analog.matrix,
        None => analog.matrix.clone(),
    };
    let (digital, degenerate) =
        digital_behind(channel, &front, spec.n_s, total_power, noise_var)?;
    let effective: Vec<DMatrix<Complex64>> = digital.iter().map(|d| &front * d).collect();

    let precoder = TriHybridPrecoder {
        digital,
        analog,
        dma: dma_precoder,
        effective,
        degenerate,
    };
    if precoder.degenerate {
        // nothing to scale; a zero precoder carries zero power
        return Ok(precoder);
    }
    enforce_power_constraint(precoder, total_power, mode)
}

/// Scales the digital precoders by one positive scalar so the selected
/// norm (antenna input or output) meets `budget` exactly. A precoder
/// already within 1e-9 relative of the budget is returned untouched.
pub fn enforce_power_constraint(
    mut precoder: TriHybridPrecoder,
    budget: f64,
    mode: PowerConstraintMode,
) -> Result<TriHybridPrecoder> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "power budget must be positive, got {budget}"
        )));
    }
    let current = precoder.norm_sq(mode);
    if current == 0.0 {
        return Err(Error::ZeroNormPrecoder);
    }
    if (current - budget).abs() <= 1e-9 * budget {
        return Ok(precoder);
    }
    let scale = Complex64::new((budget / current).sqrt(), 0.0);
    for d in &mut precoder.digital {
        *d *= scale;
    }
    for f in &mut precoder.effective {
        *f *= scale;
    }
    Ok(precoder)
}
