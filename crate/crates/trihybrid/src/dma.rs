//! Dynamic metasurface antenna (DMA) precoding stage.
//!
//! Each transmit feed excites a run of radiating slots through a
//! waveguide. A slot applies a tunable weight constrained to the
//! Lorentzian circle `{(-j + e^{j phi})/2}`, and the guided wave reaching
//! slot `m` is attenuated and phase-advanced by `eta_m`. The per-feed
//! beamformer is the entrywise product of the two, and stacking the feeds
//! block-diagonally yields the DMA precoder.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Complex64;

/// Waveguide and slot-count parameters of one DMA feed group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmaModel {
    /// Unit cells (slots) per DMA.
    pub n_unit_cells: usize,
    /// DMAs excited by one feed.
    pub n_dma_per_feed: usize,
    /// Waveguide attenuation in nepers per unit cell; non-negative so
    /// every `|eta| <= 1`.
    pub waveguide_attenuation: f64,
    /// Waveguide phase advance in radians per unit cell.
    pub waveguide_phase_advance: f64,
}

impl DmaModel {
    pub fn new(
        n_unit_cells: usize,
        n_dma_per_feed: usize,
        waveguide_attenuation: f64,
        waveguide_phase_advance: f64,
    ) -> Result<Self> {
        if n_unit_cells == 0 || n_dma_per_feed == 0 {
            return Err(Error::InvalidDimension(
                "unit cell and DMA counts must be at least 1".into(),
            ));
        }
        if !(waveguide_attenuation.is_finite() && waveguide_attenuation >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "waveguide attenuation must be non-negative, got {waveguide_attenuation}"
            )));
        }
        if !waveguide_phase_advance.is_finite() {
            return Err(Error::NonFinite("waveguide phase advance".into()));
        }
        Ok(Self {
            n_unit_cells,
            n_dma_per_feed,
            waveguide_attenuation,
            waveguide_phase_advance,
        })
    }

    /// Slots driven by one feed.
    pub fn slots_per_feed(&self) -> usize {
        self.n_unit_cells * self.n_dma_per_feed
    }
}

/// Waveguide coefficients for one feed: `eta_m = exp(-(a + j psi)(m-1))`
/// over the feed's full slot run. `|eta_1| = 1` and magnitudes are
/// non-increasing along the guide.
pub fn waveguide_coefficients(model: &DmaModel) -> DVector<Complex64> {
    let decay = Complex64::new(-model.waveguide_attenuation, -model.waveguide_phase_advance);
    DVector::from_fn(model.slots_per_feed(), |m, _| (decay * m as f64).exp())
}

/// Lorentzian slot weight `(-j + e^{j phi}) / 2`.
pub fn lorentzian_weight(phase: f64) -> Complex64 {
    (Complex64::new(0.0, -1.0) + Complex64::from_polar(1.0, phase)) * 0.5
}

/// A Lorentzian weight together with the phase parameter that generated
/// it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianWeight {
    /// Phase parameter wrapped to [0, 2pi).
    pub phase: f64,
    pub value: Complex64,
}

impl LorentzianWeight {
    pub fn new(phase: f64) -> Self {
        let wrapped = phase.rem_euclid(std::f64::consts::TAU);
        Self {
            phase: wrapped,
            value: lorentzian_weight(wrapped),
        }
    }
}

/// Maps target phases onto feasible slot weights: entry `m` is
/// `(eta_m e^{j angle(target_m)} - j eta_m) / 2`, i.e. `eta_m` times a
/// Lorentzian weight with phase parameter `angle(target_m)`.
pub fn lorentzian_map(
    target: &DVector<Complex64>,
    eta: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    if target.len() != eta.len() {
        return Err(Error::LengthMismatch(format!(
            "target has {} entries, eta has {}",
            target.len(),
            eta.len()
        )));
    }
    Ok(DVector::from_fn(target.len(), |m, _| {
        eta[m] * lorentzian_weight(target[m].arg())
    }))
}

/// Block-diagonal DMA precoder: column `n` holds feed `n`'s beamformer on
/// its own slot rows and is zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DmaPrecoder {
    pub beamformers: Vec<DVector<Complex64>>,
    pub matrix: DMatrix<Complex64>,
}

impl DmaPrecoder {
    pub fn n_feeds(&self) -> usize {
        self.beamformers.len()
    }

    pub fn slots_per_feed(&self) -> usize {
        self.beamformers[0].len()
    }
}

/// Assembles per-feed beamformers into the block-diagonal precoder.
/// All beamformers must have equal length.
pub fn assemble_dma_precoder(beamformers: Vec<DVector<Complex64>>) -> Result<DmaPrecoder> {
    if beamformers.is_empty() {
        return Err(Error::InvalidDimension("no beamformers given".into()));
    }
    let len = beamformers[0].len();
    if len == 0 {
        return Err(Error::InvalidDimension("empty beamformer".into()));
    }
    if beamformers.iter().any(|b| b.len() != len) {
        return Err(Error::LengthMismatch(
            "beamformers must all have the same length".into(),
        ));
    }
    let n_feeds = beamformers.len();
    let mut matrix = DMatrix::<Complex64>::zeros(len * n_feeds, n_feeds);
    for (n, b) in beamformers.iter().enumerate() {
        matrix.view_mut((n * len, n), (len, 1)).copy_from(b);
    }
    Ok(DmaPrecoder {
        beamformers,
        matrix,
    })
}
