//! Stick spectra and their normalizations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Default tolerance (cm⁻¹) for treating two stick energies as the same line.
pub const DEFAULT_MERGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stick {
    pub energy: f64,
    pub intensity: f64,
}

impl Stick {
    pub fn new(energy: f64, intensity: f64) -> Self {
        Self { energy, intensity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Normalization {
    /// Intensities as produced: Franck-Condon factors or event counts.
    #[default]
    Raw,
    /// Σ intensity = 1.
    UnitL1,
    /// Σ intensity² = 1.
    UnitL2,
    /// Tallest stick = 1.
    MaxOne,
    /// The 0-0 line = 1.
    ZeroZeroOne,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::UnitL1 => "unit-l1",
            Normalization::UnitL2 => "unit-l2",
            Normalization::MaxOne => "max-one",
            Normalization::ZeroZeroOne => "zero-zero-one",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "raw" => Normalization::Raw,
            "unit-l1" | "unit_l1" | "l1" => Normalization::UnitL1,
            "unit-l2" | "unit_l2" | "l2" => Normalization::UnitL2,
            "max-one" | "max_one" | "max" => Normalization::MaxOne,
            "zero-zero-one" | "zero_zero_one" | "00" => Normalization::ZeroZeroOne,
            other => {
                return Err(Error::InvalidInput(alloc::format!(
                    "unknown normalization '{other}'"
                )))
            }
        })
    }
}

/// Ordered key/value metadata describing where a spectrum came from.
///
/// Entries without a value are free-form notes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub entries: Vec<(String, Option<String>)>,
}

impl Provenance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), Some(value.to_string())));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.entries.push((text.into(), None));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, v)| k == key && v.is_some())
            .and_then(|(_, v)| v.as_deref())
    }
}

/// A discrete stick spectrum with strictly increasing energies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineSpectrum {
    pub sticks: Vec<Stick>,
    pub normalization: Normalization,
    /// Position of the 0-0 line, when known.
    pub zero_phonon: Option<f64>,
    pub provenance: Provenance,
}

impl LineSpectrum {
    /// Sorts `sticks` by energy and merges lines closer than `merge_tolerance`.
    pub fn from_sticks(mut sticks: Vec<Stick>, merge_tolerance: f64) -> Self {
        merge_sticks(&mut sticks, merge_tolerance);
        Self {
            sticks,
            ..Self::default()
        }
    }

    pub fn with_zero_phonon(mut self, e00: f64) -> Self {
        self.zero_phonon = Some(e00);
        self
    }

    pub fn len(&self) -> usize {
        self.sticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sticks.is_empty()
    }

    pub fn total_intensity(&self) -> f64 {
        self.sticks.iter().map(|s| s.intensity).sum()
    }

    /// Intensity of the stick within `tolerance` of `energy`, if any.
    pub fn intensity_at(&self, energy: f64, tolerance: f64) -> Option<f64> {
        let i = self
            .sticks
            .partition_point(|s| s.energy < energy - tolerance);
        self.sticks
            .get(i)
            .filter(|s| (s.energy - energy).abs() <= tolerance)
            .map(|s| s.intensity)
    }

    /// Rescales intensities according to `mode`. `Raw` returns a copy.
    pub fn normalize(&self, mode: Normalization) -> Result<LineSpectrum> {
        if mode == Normalization::Raw {
            return Ok(self.clone());
        }
        if self.sticks.iter().all(|s| s.intensity == 0.0) {
            return Err(Error::CannotNormalize("all intensities are zero".into()));
        }
        let scale = match mode {
            Normalization::Raw => unreachable!(),
            Normalization::UnitL1 => self.total_intensity(),
            Normalization::UnitL2 => {
                libm::sqrt(self.sticks.iter().map(|s| s.intensity * s.intensity).sum())
            }
            Normalization::MaxOne => self
                .sticks
                .iter()
                .map(|s| s.intensity)
                .fold(f64::NEG_INFINITY, f64::max),
            Normalization::ZeroZeroOne => {
                let e00 = self.zero_phonon.ok_or_else(|| {
                    Error::CannotNormalize("position of the 0-0 line is unknown".into())
                })?;
                let at = self
                    .intensity_at(e00, DEFAULT_MERGE_TOLERANCE)
                    .ok_or_else(|| {
                        Error::CannotNormalize(alloc::format!("no stick at the 0-0 line ({e00})"))
                    })?;
                if at == 0.0 {
                    return Err(Error::CannotNormalize("0-0 line has zero intensity".into()));
                }
                at
            }
        };
        let mut out = self.clone();
        for s in &mut out.sticks {
            s.intensity /= scale;
        }
        out.normalization = mode;
        Ok(out)
    }
}

/// Sorts by energy and sums runs of sticks within `tolerance` of the run's
/// first energy. Zero-intensity sticks are kept.
pub fn merge_sticks(sticks: &mut Vec<Stick>, tolerance: f64) {
    sticks.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut merged: Vec<Stick> = Vec::with_capacity(sticks.len());
    for s in sticks.drain(..) {
        match merged.last_mut() {
            Some(last) if s.energy - last.energy <= tolerance => last.intensity += s.intensity,
            _ => merged.push(s),
        }
    }
    *sticks = merged;
}

/// Histogram of sampled transition energies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledSpectrum {
    /// `(energy, count)` with strictly increasing energies.
    pub counts: Vec<(f64, u64)>,
    pub total_events: u64,
    pub zero_phonon: Option<f64>,
    pub provenance: Provenance,
}

impl SampledSpectrum {
    /// Raw stick spectrum whose intensities are the event counts.
    pub fn to_line_spectrum(&self) -> LineSpectrum {
        LineSpectrum {
            sticks: self
                .counts
                .iter()
                .map(|&(e, c)| Stick::new(e, c as f64))
                .collect(),
            normalization: Normalization::Raw,
            zero_phonon: self.zero_phonon,
            provenance: self.provenance.clone(),
        }
    }

    pub fn normalize(&self, mode: Normalization) -> Result<LineSpectrum> {
        self.to_line_spectrum().normalize(mode)
    }

    /// Fraction of events at `energy` (within the merge tolerance).
    pub fn fraction_at(&self, energy: f64) -> f64 {
        let hit = self
            .counts
            .iter()
            .find(|(e, _)| (e - energy).abs() <= DEFAULT_MERGE_TOLERANCE);
        match hit {
            Some(&(_, c)) => c as f64 / self.total_events as f64,
            None => 0.0,
        }
    }
}
