//! Subarray channel covariances and their principal eigenvectors, the
//! second-order statistics every beamformer design in this crate starts
//! from.

use nalgebra::{DMatrix, DVector};
use std::ops::Range;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::Complex64;

/// Hermitian positive-semidefinite covariance of one column slice of the
/// channel, averaged over subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct SubarrayCovariance {
    pub matrix: DMatrix<Complex64>,
}

/// Averages `H_n[k]^H H_n[k]` over subcarriers for the column slice
/// `columns` of the channel and re-symmetrizes the result.
pub fn subarray_covariance(
    channel: &ChannelRealization,
    columns: Range<usize>,
) -> Result<SubarrayCovariance> {
    let n_cols = channel.n_radiators();
    if columns.start >= columns.end || columns.end > n_cols {
        return Err(Error::IndexOutOfRange(format!(
            "column slice {}..{} outside 0..{}",
            columns.start, columns.end, n_cols
        )));
    }
    let width = columns.end - columns.start;
    let k_count = channel.n_subcarriers() as f64;
    let mut acc = DMatrix::<Complex64>::zeros(width, width);
    for h in &channel.per_subcarrier {
        let slice = h.columns(columns.start, width);
        acc += slice.adjoint() * slice;
    }
    acc /= Complex64::new(k_count, 0.0);
    // guard against rounding drift off the Hermitian manifold
    let herm = (&acc + acc.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SubarrayCovariance { matrix: herm })
}

/// Principal eigenvector of a covariance with a deterministic phase
/// convention.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponent {
    /// Unit-norm eigenvector; its first entry above the magnitude
    /// threshold is real and positive.
    pub vector: DVector<Complex64>,
    /// The associated (largest) eigenvalue.
    pub eigenvalue: f64,
    /// True when the covariance was identically zero and the vector is
    /// the first canonical basis vector by convention.
    pub degenerate: bool,
}

/// Returns the eigenvector of the largest eigenvalue. Ties are broken by
/// the lowest index in the eigendecomposition's output order, and the
/// phase is fixed by making the first non-negligible entry real-positive.
pub fn principal_eigenvector(cov: &SubarrayCovariance) -> PrincipalComponent {
    let n = cov.matrix.nrows();
    if cov.matrix.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        let mut e1 = DVector::<Complex64>::zeros(n);
        e1[0] = Complex64::new(1.0, 0.0);
        return PrincipalComponent {
            vector: e1,
            eigenvalue: 0.0,
            degenerate: true,
        };
    }
    let eig = cov.matrix.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..n {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let mut v: DVector<Complex64> = eig.eigenvectors.column(best).clone_owned();
    fix_phase(&mut v);
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    PrincipalComponent {
        vector: v,
        eigenvalue: eig.eigenvalues[best],
        degenerate: false,
    }
}

/// Rotates a vector so its first entry with magnitude above 1e-12 is
/// real-positive.
pub(crate) fn fix_phase(v: &mut DVector<Complex64>) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12) {
        let rot = first.conj() / Complex64::new(first.norm(), 0.0);
        *v *= rot;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_k_channel(h: DMatrix<Complex64>) -> ChannelRealization {
        ChannelRealization {
            per_subcarrier: vec![h],
            n_paths: 1,
        }
    }

    #[test]
    fn single_subcarrier_column_is_rank_one_gram() {
        let h = DMatrix::from_column_slice(3, 1, &[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)]);
        let ch = single_k_channel(h.clone());
        let cov = subarray_covariance(&ch, 0..1).unwrap();
        // R = h^H h is 1x1 with trace |h|^2
        assert_eq!(cov.matrix.nrows(), 1);
        assert_relative_eq!(cov.matrix[(0, 0)].re, 7.0, epsilon = 1e-12);
        assert!(cov.matrix[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn zero_channel_gives_zero_covariance() {
        let ch = ChannelRealization {
            per_subcarrier: vec![DMatrix::zeros(2, 4); 3],
            n_paths: 1,
        };
        let cov = subarray_covariance(&ch, 1..3).unwrap();
        assert!(cov.matrix.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn covariance_matches_loop_accumulated_gram() {
        // random 4-slot slice over 8 subcarriers against a scalar-loop oracle
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mats: Vec<DMatrix<Complex64>> = (0..8)
            .map(|_| {
                DMatrix::from_fn(3, 6, |_, _| {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            })
            .collect();
        let ch = ChannelRealization {
            per_subcarrier: mats.clone(),
            n_paths: 2,
        };
        let cov = subarray_covariance(&ch, 1..5).unwrap();
        for r in 0..4 {
            for s in 0..4 {
                let mut expect = c(0.0, 0.0);
                for h in &mats {
                    for row in 0..3 {
                        expect += h[(row, 1 + r)].conj() * h[(row, 1 + s)];
                    }
                }
                expect /= c(8.0, 0.0);
                assert_relative_eq!(cov.matrix[(r, s)].re, expect.re, epsilon = 1e-12);
                assert_relative_eq!(cov.matrix[(r, s)].im, expect.im, epsilon = 1e-12);
            }
        }
        // Hermitian PSD
        assert!((&cov.matrix - cov.matrix.adjoint()).norm() < 1e-12);
        let eig = cov.matrix.clone().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn covariance_rejects_out_of_range_slice() {
        let ch = ChannelRealization {
            per_subcarrier: vec![DMatrix::zeros(2, 4)],
            n_paths: 1,
        };
        assert!(subarray_covariance(&ch, 2..5).is_err());
        assert!(subarray_covariance(&ch, 3..3).is_err());
    }

    #[test]
    fn diagonal_covariance_selects_dominant_axis() {
        let cov = SubarrayCovariance {
            matrix: DMatrix::from_diagonal(&DVector::from_column_slice(&[c(3.0, 0.0), c(1.0, 0.0)])),
        };
        let pc = principal_eigenvector(&cov);
        assert!(!pc.degenerate);
        assert_relative_eq!(pc.eigenvalue, 3.0, epsilon = 1e-12);
        assert_relative_eq!(pc.vector[0].re, 1.0, epsilon = 1e-12);
        assert!(pc.vector[1].norm() < 1e-12);
    }

    #[test]
    fn identity_tie_resolves_to_first_basis_vector() {
        let cov = SubarrayCovariance {
            matrix: DMatrix::identity(5, 5),
        };
        let pc = principal_eigenvector(&cov);
        assert!(!pc.degenerate);
        assert_relative_eq!(pc.vector[0].re, 1.0, epsilon = 1e-12);
        for i in 1..5 {
            assert!(pc.vector[i].norm() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_is_flagged_degenerate() {
        let cov = SubarrayCovariance {
            matrix: DMatrix::zeros(4, 4),
        };
        let pc = principal_eigenvector(&cov);
        assert!(pc.degenerate);
        assert_eq!(pc.eigenvalue, 0.0);
        assert_relative_eq!(pc.vector[0].re, 1.0, epsilon = 1e-15);
    }

    /// Power iteration with a deterministic start, used as an independent
    /// oracle for the dominant eigenpair.
    fn power_iteration(m: &DMatrix<Complex64>, iters: usize) -> (DVector<Complex64>, f64) {
        let n = m.nrows();
        let mut v = DVector::from_element(n, c(1.0, 0.0)) / c((n as f64).sqrt(), 0.0);
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w = m * &v;
            let norm = w.norm();
            if norm == 0.0 {
                break;
            }
            v = w / c(norm, 0.0);
            lambda = (v.adjoint() * m * &v)[(0, 0)].re;
        }
        (v, lambda)
    }

    #[test]
    fn principal_pair_agrees_with_power_iteration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let a = DMatrix::from_fn(6, 6, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let cov = SubarrayCovariance {
                matrix: &a * a.adjoint(),
            };
            let pc = principal_eigenvector(&cov);
            let (_, lambda_oracle) = power_iteration(&cov.matrix, 3000);
            assert_relative_eq!(pc.eigenvalue, lambda_oracle, max_relative = 1e-10);
            let residual = (&cov.matrix * &pc.vector - &pc.vector * c(lambda_oracle, 0.0)).norm();
            assert!(residual <= 1e-8, "residual {residual}");
            assert_relative_eq!(pc.vector.norm(), 1.0, epsilon = 1e-12);
            // phase convention: first non-negligible entry real-positive
            let first = pc.vector.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-10 && first.re > 0.0);
        }
    }
}
