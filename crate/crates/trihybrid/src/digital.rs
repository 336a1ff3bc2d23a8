//! Frequency-selective digital precoder design by eigenmode waterfilling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::waterfill::waterfill;
use crate::Complex64;

/// Per-subcarrier digital precoding matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalPrecoder {
    /// One `n_ports x n_streams` matrix per subcarrier.
    pub per_subcarrier: Vec<DMatrix<Complex64>>,
    /// Set when the effective channel was identically zero and the
    /// precoder is all-zero.
    pub degenerate: bool,
}

impl DigitalPrecoder {
    /// Total Frobenius power summed over subcarriers.
    pub fn total_power(&self) -> f64 {
        self.per_subcarrier.iter().map(|f| f.norm_squared()).sum()
    }
}

/// Designs the digital precoder for an effective channel: per subcarrier
/// the top `n_streams` right singular vectors, weighted by amplitudes
/// waterfilled jointly across all retained modes of all subcarriers so
/// the total Frobenius power equals `total_power`.
///
/// A zero effective channel yields an all-zero precoder flagged
/// `degenerate` instead of an error, so a dead channel draw does not
/// abort a sweep.
pub fn design_digital_precoder(
    effective_channel: &[DMatrix<Complex64>],
    n_streams: usize,
    total_power: f64,
    noise_var: f64,
) -> Result<DigitalPrecoder> {
    if effective_channel.is_empty() {
        return Err(Error::InvalidDimension("no subcarrier matrices".into()));
    }
    if n_streams == 0 {
        return Err(Error::InvalidDimension("n_streams must be at least 1".into()));
    }
    if !(total_power.is_finite() && total_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "total_power must be positive, got {total_power}"
        )));
    }
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise_var must be positive, got {noise_var}"
        )));
    }
    let (n_rows, n_ports) = effective_channel[0].shape();
    for h in effective_channel {
        if h.shape() != (n_rows, n_ports) {
            return Err(Error::InvalidDimension(
                "subcarrier matrices differ in shape".into(),
            ));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("effective channel".into()));
        }
    }

    let k_count = effective_channel.len();
    let retained = n_streams.min(n_rows).min(n_ports);

    struct Modes {
        vectors: Vec<DVector<Complex64>>,
        gains: Vec<f64>,
    }
    let modes: Vec<Modes> = effective_channel
        .iter()
        .map(|h| {
            let svd = h.clone().svd(false, true);
            let v_t = svd.v_t.as_ref().expect("svd requested v_t");
            let mut vectors = Vec::with_capacity(retained);
            let mut gains = Vec::with_capacity(retained);
            for i in 0..retained {
                vectors.push(v_t.row(i).adjoint());
                let s = svd.singular_values[i];
                gains.push(s * s / noise_var);
            }
            Modes { vectors, gains }
        })
        .collect();

    let all_gains: Vec<f64> = modes.iter().flat_map(|m| m.gains.iter().copied()).collect();
    if all_gains.iter().all(|g| *g == 0.0) {
        return Ok(DigitalPrecoder {
            per_subcarrier: vec![DMatrix::zeros(n_ports, n_streams); k_count],
            degenerate: true,
        });
    }

    let alloc = waterfill(&all_gains, total_power)?;
    let per_subcarrier = modes
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut f = DMatrix::<Complex64>::zeros(n_ports, n_streams);
            for i in 0..retained {
                let p = alloc[k * retained + i];
                if p > 0.0 {
                    let col = &m.vectors[i] * Complex64::new(p.sqrt(), 0.0);
                    f.set_column(i, &col);
                }
            }
            f
        })
        .collect();

    Ok(DigitalPrecoder {
        per_subcarrier,
        degenerate: false,
    })
}
