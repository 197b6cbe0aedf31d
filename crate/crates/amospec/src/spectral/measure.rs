//! Spectral measures of finite site vectors, read off eigensolve data.
//!
//! For phi = sum_s c_s delta_s the truncation's spectral measure is the
//! atomic measure sum_k |<phi, psi_k>|^2 delta_{E_k}; its p-th moment is
//! <phi, T^p phi> exactly, which is how the construction is audited.

use super::{SpectralData, SpectralError};
use crate::measure::DiscreteMeasure;

/// Spectral measure of the site vector `phi = [(site, coefficient), ..]`
/// with respect to a truncation's spectral data. Atoms whose weight
/// underflows to zero are dropped; duplicate eigenvalues are merged.
pub fn spectral_measure(
    data: &SpectralData,
    phi: &[(i64, f64)],
) -> Result<DiscreteMeasure<f64>, SpectralError> {
    let overlaps = data.overlaps(phi)?;
    let atoms: Vec<(f64, f64)> = data
        .eigenvalues()
        .iter()
        .zip(overlaps.iter())
        .map(|(&e, &c)| (e, c * c))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    if atoms.is_empty() {
        return Err(SpectralError::DegenerateVector {
            name: "spectral weights",
        });
    }
    Ok(DiscreteMeasure::from_atoms(atoms)?)
}
