//! Wideband geometric MIMO channel between the transmit radiators (DMA
//! slots or plain antennas) and a receive ULA.
//!
//! The transmit array is a uniform planar array in the xy plane with
//! radiators indexed x-fastest: the radiator at grid position
//! `(ix, iy)` occupies flat index `iy * n_x + ix`. This ordering is what
//! maps slots onto DMA waveguides, so it must not change.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};
use crate::Complex64;

/// Transmit/receive array dimensions and spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    /// Receive antenna count.
    pub n_rx: usize,
    /// Receive inter-element spacing in meters.
    pub rx_spacing: f64,
    /// Transmit radiators per row along x.
    pub n_x: usize,
    /// Transmit rows along y.
    pub n_y: usize,
    /// Transmit x spacing in meters.
    pub x_spacing: f64,
    /// Transmit y spacing in meters.
    pub y_spacing: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Free-space wavenumber, always `2π / wavelength`.
    pub wavenumber: f64,
}

impl ArrayGeometry {
    pub fn new(
        n_rx: usize,
        rx_spacing: f64,
        n_x: usize,
        n_y: usize,
        x_spacing: f64,
        y_spacing: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if n_rx == 0 || n_x == 0 || n_y == 0 {
            return Err(Error::InvalidDimension(
                "array counts must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("rx_spacing", rx_spacing),
            ("x_spacing", x_spacing),
            ("y_spacing", y_spacing),
            ("wavelength", wavelength),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            n_rx,
            rx_spacing,
            n_x,
            n_y,
            x_spacing,
            y_spacing,
            wavelength,
            wavenumber: TAU / wavelength,
        })
    }

    /// Total transmit radiator count `n_x * n_y`.
    pub fn n_radiators(&self) -> usize {
        self.n_x * self.n_y
    }
}

/// One multi-path component: complex gain, delay, and departure/arrival
/// angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub gain: Complex64,
    pub delay: f64,
    pub aoa_elevation: f64,
    pub aoa_azimuth: f64,
    pub aod_elevation: f64,
    pub aod_azimuth: f64,
}

impl PathComponent {
    fn validate(&self) -> Result<()> {
        let fields = [
            self.gain.re,
            self.gain.im,
            self.delay,
            self.aoa_elevation,
            self.aoa_azimuth,
            self.aod_elevation,
            self.aod_azimuth,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("path component".into()));
        }
        if self.delay < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "path delay must be non-negative, got {}",
                self.delay
            )));
        }
        Ok(())
    }
}

/// Raised-cosine pulse and OFDM block parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    /// Symbol duration T_s in seconds.
    pub symbol_duration: f64,
    /// Roll-off factor in [0, 1].
    pub rolloff: f64,
    /// Number of delay taps D in the frequency response sum.
    pub n_taps: usize,
    /// Number of subcarriers K.
    pub n_subcarriers: usize,
}

impl PulseShape {
    pub fn new(symbol_duration: f64, rolloff: f64, n_taps: usize, n_subcarriers: usize) -> Result<Self> {
        if !(symbol_duration.is_finite() && symbol_duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symbol_duration must be positive, got {symbol_duration}"
            )));
        }
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(Error::InvalidParameter(format!(
                "rolloff must lie in [0, 1], got {rolloff}"
            )));
        }
        if n_taps == 0 || n_subcarriers == 0 {
            return Err(Error::InvalidDimension(
                "n_taps and n_subcarriers must be at least 1".into(),
            ));
        }
        Ok(Self {
            symbol_duration,
            rolloff,
            n_taps,
            n_subcarriers,
        })
    }
}

/// Per-subcarrier channel matrices, each `n_rx` x `n_radiators`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub per_subcarrier: Vec<DMatrix<Complex64>>,
    pub n_paths: usize,
}

impl ChannelRealization {
    pub fn n_subcarriers(&self) -> usize {
        self.per_subcarrier.len()
    }

    pub fn n_rx(&self) -> usize {
        self.per_subcarrier[0].nrows()
    }

    pub fn n_radiators(&self) -> usize {
        self.per_subcarrier[0].ncols()
    }

    /// Mean over subcarriers of the squared Frobenius norm.
    pub fn mean_sq_frobenius(&self) -> f64 {
        let sum: f64 = self.per_subcarrier.iter().map(|h| h.norm_squared()).sum();
        sum / self.per_subcarrier.len() as f64
    }

    /// Rescales the realization so that `mean_sq_frobenius` equals
    /// `target` exactly (strict normalization mode). A zero channel is
    /// left untouched.
    pub fn rescale_to_mean_sq(&mut self, target: f64) {
        let current = self.mean_sq_frobenius();
        if current > 0.0 {
            let factor = Complex64::new((target / current).sqrt(), 0.0);
            for h in &mut self.per_subcarrier {
                *h *= factor;
            }
        }
    }
}

/// Receive ULA steering vector; entry `i` is
/// `exp(j i k0 d_r sin(el) cos(az)) / sqrt(n_rx)`.
pub fn rx_steering_vector(elevation: f64, azimuth: f64, geometry: &ArrayGeometry) -> DVector<Complex64> {
    let phase_step = geometry.wavenumber * geometry.rx_spacing * elevation.sin() * azimuth.cos();
    let scale = 1.0 / (geometry.n_rx as f64).sqrt();
    DVector::from_fn(geometry.n_rx, |i, _| {
        Complex64::from_polar(scale, i as f64 * phase_step)
    })
}

/// Transmit UPA steering vector with x-fastest flattening; the radiator
/// at `(ix, iy)` contributes
/// `exp(j ix k0 dx sin(el) cos(az)) * exp(j iy k0 dy sin(el) sin(az)) / sqrt(n_rad)`.
pub fn tx_upa_steering_vector(elevation: f64, azimuth: f64, geometry: &ArrayGeometry) -> DVector<Complex64> {
    let sin_el = elevation.sin();
    let x_step = geometry.wavenumber * geometry.x_spacing * sin_el * azimuth.cos();
    let y_step = geometry.wavenumber * geometry.y_spacing * sin_el * azimuth.sin();
    let scale = 1.0 / (geometry.n_radiators() as f64).sqrt();
    DVector::from_fn(geometry.n_radiators(), |g, _| {
        let ix = (g % geometry.n_x) as f64;
        let iy = (g / geometry.n_x) as f64;
        Complex64::from_polar(scale, ix * x_step + iy * y_step)
    })
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Raised-cosine impulse response
/// `sinc(t/T) cos(pi b t/T) / (1 - (2 b t/T)^2)`, with the removable
/// singularity at `|2 b t / T| = 1` evaluated by its limit
/// `(pi/4) sinc(1/(2b))`.
pub fn raised_cosine(t: f64, symbol_duration: f64, rolloff: f64) -> f64 {
    let x = t / symbol_duration;
    let u = 2.0 * rolloff * x;
    let denom = 1.0 - u * u;
    if denom.abs() < 1e-8 {
        (PI / 4.0) * sinc(1.0 / (2.0 * rolloff))
    } else {
        sinc(x) * (PI * rolloff * x).cos() / denom
    }
}

/// Frequency response of the pulse at subcarrier `k` for a path delay:
/// the D-term sum of `p(d T_s - delay) exp(-j 2 pi k d / K)`.
pub fn pulse_freq_response(delay: f64, shape: &PulseShape, subcarrier: usize) -> Complex64 {
    assert!(
        subcarrier < shape.n_subcarriers,
        "subcarrier {} out of range (K = {})",
        subcarrier,
        shape.n_subcarriers
    );
    let k_over_k = subcarrier as f64 / shape.n_subcarriers as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..shape.n_taps {
        let tap = raised_cosine(
            d as f64 * shape.symbol_duration - delay,
            shape.symbol_duration,
            shape.rolloff,
        );
        acc += Complex64::from_polar(tap, -TAU * k_over_k * d as f64);
    }
    acc
}

/// Builds the per-subcarrier channel as the scaled sum of per-path
/// rank-one terms `gain * omega[k] * a_r a_t^H`, with the overall factor
/// `sqrt(n_rad * n_rx / L)`.
pub fn generate_channel(
    paths: &[PathComponent],
    geometry: &ArrayGeometry,
    shape: &PulseShape,
) -> Result<ChannelRealization> {
    if paths.is_empty() {
        return Err(Error::EmptyPaths);
    }
    for p in paths {
        p.validate()?;
    }

    let n_rx = geometry.n_rx;
    let n_rad = geometry.n_radiators();
    let scale = ((n_rad * n_rx) as f64 / paths.len() as f64).sqrt();

    let steering: Vec<(DVector<Complex64>, DVector<Complex64>)> = paths
        .iter()
        .map(|p| {
            (
                rx_steering_vector(p.aoa_elevation, p.aoa_azimuth, geometry),
                tx_upa_steering_vector(p.aod_elevation, p.aod_azimuth, geometry),
            )
        })
        .collect();

    let per_subcarrier = (0..shape.n_subcarriers)
        .map(|k| {
            let mut h = DMatrix::<Complex64>::zeros(n_rx, n_rad);
            for (p, (a_rx, a_tx)) in paths.iter().zip(&steering) {
                let w = pulse_freq_response(p.delay, shape, k);
                // rank-one update: h += scale * gain * w * a_rx a_tx^H
                h.gerc(p.gain * w * scale, a_rx, a_tx, Complex64::new(1.0, 0.0));
            }
            h
        })
        .collect();

    Ok(ChannelRealization {
        per_subcarrier,
        n_paths: paths.len(),
    })
}

/// Draws random path components: unit-variance circularly-symmetric
/// Gaussian gains, elevations uniform on [0, pi/2], azimuths uniform on
/// [0, 2pi), and delays uniform on the tap grid
/// {0, T_s, ..., (D-1) T_s}.
///
/// Sampling delays on the tap grid keeps `|omega[k]| = 1` for every
/// subcarrier, which is what makes the channel normalization hold
/// per-subcarrier and not just on average over the band.
///
/// The draw order per path is fixed (gain re/im, AoA pair, AoD pair,
/// delay tap), so a seeded generator reproduces path lists exactly.
pub fn sample_paths<R: Rng + ?Sized>(
    n_paths: usize,
    shape: &PulseShape,
    rng: &mut R,
) -> Result<Vec<PathComponent>> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
    }
    let paths = (0..n_paths)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let gain = Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
            let aoa_elevation = rng.random_range(0.0..PI / 2.0);
            let aoa_azimuth = rng.random_range(0.0..TAU);
            let aod_elevation = rng.random_range(0.0..PI / 2.0);
            let aod_azimuth = rng.random_range(0.0..TAU);
            let tap = rng.random_range(0..shape.n_taps);
            PathComponent {
                gain,
                delay: tap as f64 * shape.symbol_duration,
                aoa_elevation,
                aoa_azimuth,
                aod_elevation,
                aod_azimuth,
            }
        })
        .collect();
    Ok(paths)
}
