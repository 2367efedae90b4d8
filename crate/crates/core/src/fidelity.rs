//! Overlap between two stick spectra.

use alloc::collections::BTreeMap;

use crate::spectrum::LineSpectrum;
use crate::{Error, Result};

/// Energies are compared on a lattice of this spacing (cm⁻¹).
pub const KEY_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FidelityNorm {
    /// `Σ pᵢqᵢ` over L2-normalized intensities (cosine similarity).
    #[default]
    L2,
    /// `Σ √(pᵢqᵢ)` over L1-normalized intensities.
    Bhattacharyya,
}

impl core::str::FromStr for FidelityNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(FidelityNorm::L2),
            "bhattacharyya" => Ok(FidelityNorm::Bhattacharyya),
            other => Err(Error::InvalidInput(alloc::format!(
                "unknown fidelity norm '{other}'"
            ))),
        }
    }
}

/// Canonical lattice key of an energy.
pub fn energy_key(energy: f64) -> i64 {
    libm::round(energy / KEY_RESOLUTION) as i64
}

fn check(s: &LineSpectrum) -> Result<()> {
    if let Some(bad) = s
        .sticks
        .iter()
        .find(|s| !(s.intensity >= 0.0 && s.intensity.is_finite()))
    {
        return Err(Error::InvalidInput(alloc::format!(
            "intensity at {} is {}",
            bad.energy,
            bad.intensity
        )));
    }
    if s.sticks.iter().all(|s| s.intensity == 0.0) {
        return Err(Error::EmptySpectrum);
    }
    Ok(())
}

/// Aligns both spectra on the union of their energy keys (missing lines count
/// as zero) and returns their overlap in `[0, 1]`.
pub fn fidelity(p: &LineSpectrum, q: &LineSpectrum, norm: FidelityNorm) -> Result<f64> {
    check(p)?;
    check(q)?;
    let mut aligned: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for s in &p.sticks {
        aligned.entry(energy_key(s.energy)).or_default().0 += s.intensity;
    }
    for s in &q.sticks {
        aligned.entry(energy_key(s.energy)).or_default().1 += s.intensity;
    }

    let f = match norm {
        FidelityNorm::L2 => {
            let (mut dot, mut pp, mut qq) = (0.0, 0.0, 0.0);
            for &(a, b) in aligned.values() {
                dot += a * b;
                pp += a * a;
                qq += b * b;
            }
            dot / (libm::sqrt(pp) * libm::sqrt(qq))
        }
        FidelityNorm::Bhattacharyya => {
            let (mut sp, mut sq) = (0.0, 0.0);
            for &(a, b) in aligned.values() {
                sp += a;
                sq += b;
            }
            aligned
                .values()
                .map(|&(a, b)| libm::sqrt((a / sp) * (b / sq)))
                .sum()
        }
    };
    Ok(f.clamp(0.0, 1.0))
}
