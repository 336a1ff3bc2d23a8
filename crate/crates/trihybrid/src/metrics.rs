//! Spectral and energy efficiency of a designed link.

use nalgebra::DMatrix;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::Complex64;

/// Everything measured about one (channel, precoder, power) operating
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    /// Mutual information summed over subcarriers, bits/s/Hz.
    pub spectral_efficiency: f64,
    pub noise_var: f64,
    pub transmit_power: f64,
    pub consumed_power: f64,
    /// `spectral_efficiency / consumed_power`.
    pub energy_efficiency: f64,
}

/// Sum over subcarriers of
/// `log2 det(I + (1/noise_var) H[k] F[k] F[k]^H H[k]^H)`.
///
/// Evaluated on the stream-side Gram matrix
/// `I + (1/noise_var) (H F)^H (H F)`, which has the same determinant and
/// stays small, via a Cholesky factorization (with a Hermitian
/// eigenvalue fallback if rounding pushes the factorization off the
/// positive-definite cone).
pub fn spectral_efficiency(
    channel: &ChannelRealization,
    composite_precoder: &[DMatrix<Complex64>],
    noise_var: f64,
) -> Result<f64> {
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise_var must be positive, got {noise_var}"
        )));
    }
    if composite_precoder.len() != channel.n_subcarriers() {
        return Err(Error::InvalidDimension(format!(
            "{} precoder matrices for {} subcarriers",
            composite_precoder.len(),
            channel.n_subcarriers()
        )));
    }
    let mut total = 0.0;
    for (h, f) in channel.per_subcarrier.iter().zip(composite_precoder) {
        if f.nrows() != h.ncols() {
            return Err(Error::InvalidDimension(format!(
                "precoder has {} rows for a {}-radiator channel",
                f.nrows(),
                h.ncols()
            )));
        }
        if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("channel or precoder entry".into()));
        }
        let g = h * f;
        let n_s = g.ncols();
        let gram = g.adjoint() * &g / Complex64::new(noise_var, 0.0);
        let b = DMatrix::<Complex64>::identity(n_s, n_s) + &gram;
        let b = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
        total += match b.clone().cholesky() {
            Some(chol) => {
                let l = chol.l();
                (0..n_s).map(|i| 2.0 * l[(i, i)].re.log2()).sum::<f64>()
            }
            None => b
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .map(|lam| lam.max(1.0).log2())
                .sum::<f64>(),
        };
    }
    // rounding can leave a zero-precoder sum at -1e-16
    Ok(total.max(0.0))
}

/// Ratio of spectral efficiency to consumed power.
pub fn energy_efficiency(spectral_efficiency: f64, consumed_power: f64) -> Result<f64> {
    if !(consumed_power.is_finite() && consumed_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "consumed power must be positive, got {consumed_power}"
        )));
    }
    Ok(spectral_efficiency / consumed_power)
}
