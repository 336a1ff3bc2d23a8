//! Analog (phase-shifter) precoding stage.
//!
//! Two network topologies are modeled. In the partially-connected form
//! each RF chain drives its own subarray, so the precoder is
//! block-diagonal with one unimodular vector per block. In the
//! fully-connected form every RF chain reaches every antenna and the
//! whole matrix is phase-only.

use nalgebra::{DMatrix, DVector};

use crate::channel::ChannelRealization;
use crate::covariance::{fix_phase, principal_eigenvector, subarray_covariance};
use crate::error::{Error, Result};
use crate::Complex64;

/// How the RF chains attach to the antenna ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Dense phase-only matrix; every chain feeds every antenna.
    FullyConnected,
    /// Block-diagonal; each chain feeds a disjoint subarray.
    PartiallyConnected,
    /// No analog stage; the matrix is an identity placeholder.
    None,
}

/// Frequency-flat analog precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogPrecoder {
    pub matrix: DMatrix<Complex64>,
    pub connectivity: Connectivity,
}

impl AnalogPrecoder {
    /// Identity pass-through for architectures without an analog stage.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
            connectivity: Connectivity::None,
        }
    }

    pub fn n_ports(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_chains(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Designs the block-diagonal precoder: block `l` is
/// `e^{j angle(v_l)} / sqrt(n_sub)` where `v_l` is the principal
/// eigenvector of the `l`th subarray covariance of `channel`.
///
/// The channel's column count must be divisible by `n_rf`.
pub fn design_analog_partially_connected(
    channel: &ChannelRealization,
    n_rf: usize,
) -> Result<AnalogPrecoder> {
    let n_ports = channel.n_radiators();
    if n_rf == 0 || n_ports % n_rf != 0 {
        return Err(Error::InvalidDimension(format!(
            "{n_ports} ports not divisible into {n_rf} subarrays"
        )));
    }
    let n_sub = n_ports / n_rf;
    let scale = 1.0 / (n_sub as f64).sqrt();
    let mut matrix = DMatrix::<Complex64>::zeros(n_ports, n_rf);
    for l in 0..n_rf {
        let cov = subarray_covariance(channel, l * n_sub..(l + 1) * n_sub)?;
        let pc = principal_eigenvector(&cov);
        for m in 0..n_sub {
            matrix[(l * n_sub + m, l)] = Complex64::from_polar(scale, pc.vector[m].arg());
        }
    }
    Ok(AnalogPrecoder {
        matrix,
        connectivity: Connectivity::PartiallyConnected,
    })
}

/// Designs the dense phase-only precoder: column `r` is
/// `e^{j angle(u_r)} / sqrt(n_ports)` with `u_r` the `r`th dominant
/// eigenvector of the subcarrier-averaged transmit covariance.
pub fn design_analog_fully_connected(
    channel: &ChannelRealization,
    n_rf: usize,
) -> Result<AnalogPrecoder> {
    let n_ports = channel.n_radiators();
    if n_rf == 0 || n_rf > n_ports {
        return Err(Error::InvalidDimension(format!(
            "need 1..={n_ports} RF chains, got {n_rf}"
        )));
    }
    let cov = subarray_covariance(channel, 0..n_ports)?;
    let eig = cov.matrix.clone().symmetric_eigen();
    // sort by eigenvalue descending, ties by original index
    let mut order: Vec<usize> = (0..n_ports).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let scale = 1.0 / (n_ports as f64).sqrt();
    let mut matrix = DMatrix::<Complex64>::zeros(n_ports, n_rf);
    for r in 0..n_rf {
        let mut u: DVector<Complex64> = eig.eigenvectors.column(order[r]).clone_owned();
        fix_phase(&mut u);
        for m in 0..n_ports {
            matrix[(m, r)] = Complex64::from_polar(scale, u[m].arg());
        }
    }
    Ok(AnalogPrecoder {
        matrix,
        connectivity: Connectivity::FullyConnected,
    })
}
