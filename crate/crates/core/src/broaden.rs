//! Line-shape broadening of stick spectra onto a regular grid.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::spectrum::{LineSpectrum, Normalization, Stick};
use crate::{Error, Result};

/// Largest number of grid intervals accepted.
pub const MAX_GRID_INTERVALS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Lorentzian,
    Gaussian,
}

impl core::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lorentzian" => Ok(Shape::Lorentzian),
            "gaussian" => Ok(Shape::Gaussian),
            other => Err(Error::InvalidInput(alloc::format!("unknown line shape '{other}'"))),
        }
    }
}

/// Unit-area line shape with a given full width at half maximum (cm⁻¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadeningKernel {
    pub shape: Shape,
    pub fwhm: f64,
}

impl BroadeningKernel {
    pub fn new(shape: Shape, fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!("fwhm must be > 0, got {fwhm}")));
        }
        Ok(Self { shape, fwhm })
    }

    /// Gaussian standard deviation, `FWHM / (2 √(2 ln 2))`.
    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * libm::sqrt(2.0 * core::f64::consts::LN_2))
    }

    /// Kernel value at offset `x` from the line centre.
    pub fn eval(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Lorentzian => {
                let gamma = 0.5 * self.fwhm;
                gamma / (PI * (x * x + gamma * gamma))
            }
            Shape::Gaussian => {
                let sigma = self.sigma();
                libm::exp(-x * x / (2.0 * sigma * sigma)) / (sigma * libm::sqrt(2.0 * PI))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl EnergyGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Grid("bounds and step must be finite".into()));
        }
        if stop <= start {
            return Err(Error::Grid(alloc::format!("stop ({stop}) must exceed start ({start})")));
        }
        if step <= 0.0 {
            return Err(Error::Grid(alloc::format!("step must be > 0, got {step}")));
        }
        if step > stop - start {
            return Err(Error::Grid(alloc::format!(
                "step ({step}) is wider than the range [{start}, {stop}]"
            )));
        }
        if (stop - start) / step > MAX_GRID_INTERVALS {
            return Err(Error::Grid(alloc::format!(
                "{} intervals exceeds the limit of {MAX_GRID_INTERVALS}",
                (stop - start) / step
            )));
        }
        Ok(Self { start, stop, step })
    }

    /// Grid with step `FWHM / 20` reaching `10 × FWHM` past the outer sticks.
    pub fn covering(spec: &LineSpectrum, kernel: &BroadeningKernel) -> Result<Self> {
        let (lo, hi) = match (spec.sticks.first(), spec.sticks.last()) {
            (Some(a), Some(b)) => (a.energy, b.energy),
            _ => return Err(Error::EmptySpectrum),
        };
        let margin = 10.0 * kernel.fwhm;
        Self::new(lo - margin, hi + margin, kernel.fwhm / 20.0)
    }

    pub fn len(&self) -> usize {
        libm::floor((self.stop - self.start) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.start + k as f64 * self.step)
    }

    /// Whether every stick is at least `5 × FWHM` inside the grid.
    pub fn has_margin(&self, spec: &LineSpectrum, kernel: &BroadeningKernel) -> bool {
        let margin = 5.0 * kernel.fwhm;
        let last = self.start + (self.len() - 1) as f64 * self.step;
        spec.sticks
            .iter()
            .all(|s| s.energy - self.start >= margin && last - s.energy >= margin)
    }
}

/// Sum of kernels centred on every stick, sampled on `grid`.
pub fn broaden(spec: &LineSpectrum, kernel: &BroadeningKernel, grid: &EnergyGrid) -> LineSpectrum {
    let sticks: Vec<Stick> = grid
        .points()
        .map(|x| {
            let y = spec
                .sticks
                .iter()
                .map(|s| s.intensity * kernel.eval(x - s.energy))
                .sum();
            Stick::new(x, y)
        })
        .collect();
    let mut provenance = spec.provenance.clone();
    provenance
        .push(
            "broadening",
            match kernel.shape {
                Shape::Lorentzian => "lorentzian",
                Shape::Gaussian => "gaussian",
            },
        )
        .push("fwhm_cm1", kernel.fwhm);
    LineSpectrum {
        sticks,
        normalization: Normalization::Raw,
        zero_phonon: spec.zero_phonon,
        provenance,
    }
}

/// Trapezoid-rule integral of a gridded spectrum.
pub fn trapezoid(spec: &LineSpectrum) -> f64 {
    spec.sticks
        .windows(2)
        .map(|w| 0.5 * (w[0].intensity + w[1].intensity) * (w[1].energy - w[0].energy))
        .sum()
}
