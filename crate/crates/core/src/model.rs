//! Molecules, vibrational modes and Huang-Rhys factors.
//!
//! Energies (mode quanta and the zero-phonon line) are wavenumbers in cm⁻¹.
//! Huang-Rhys factors are dimensionless.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Default pruning threshold on Huang-Rhys factors.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-5;

/// One vibrational normal mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// 1-based ordinal within the molecule.
    pub index: usize,
    /// Vibrational quantum in cm⁻¹.
    pub energy: f64,
    /// Huang-Rhys factor, the Poisson mean of this mode's progression.
    pub huang_rhys: f64,
}

impl Mode {
    pub fn new(index: usize, energy: f64, huang_rhys: f64) -> Self {
        Self {
            index,
            energy,
            huang_rhys,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    /// Vibronic lines sit above the 0-0 line.
    Absorption,
    /// Vibronic lines sit below the 0-0 line.
    Emission,
}

impl Transition {
    /// `+1.0` for absorption, `-1.0` for emission.
    pub fn sign(self) -> f64 {
        match self {
            Transition::Absorption => 1.0,
            Transition::Emission => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub name: String,
    /// Zero-phonon line in cm⁻¹.
    pub e00: f64,
    pub transition: Transition,
    pub modes: Vec<Mode>,
    pub atom_count: Option<usize>,
}

impl Molecule {
    /// Builds a molecule from `(energy, huang_rhys)` pairs, numbering modes from 1.
    pub fn from_pairs(
        name: impl Into<String>,
        e00: f64,
        transition: Transition,
        pairs: &[(f64, f64)],
    ) -> Self {
        let modes = pairs
            .iter()
            .enumerate()
            .map(|(i, &(e, s))| Mode::new(i + 1, e, s))
            .collect();
        Self {
            name: name.into(),
            e00,
            transition,
            modes,
            atom_count: None,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Sum of all Huang-Rhys factors.
    pub fn total_huang_rhys(&self) -> f64 {
        self.modes.iter().map(|m| m.huang_rhys).sum()
    }

    /// Checks that `config` has one entry per mode.
    pub fn check_configuration(&self, config: &VibrationalConfiguration) -> Result<()> {
        if config.len() != self.modes.len() {
            return Err(Error::LengthMismatch {
                expected: self.modes.len(),
                found: config.len(),
            });
        }
        Ok(())
    }
}

/// Quanta `(j_1, ..., j_N)` excited in each mode of the final state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VibrationalConfiguration(pub Vec<u32>);

impl VibrationalConfiguration {
    pub fn ground(modes: usize) -> Self {
        Self(alloc::vec![0; modes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn quanta(&self) -> &[u32] {
        &self.0
    }

    pub fn total_quanta(&self) -> u64 {
        self.0.iter().map(|&j| u64::from(j)).sum()
    }
}

impl From<Vec<u32>> for VibrationalConfiguration {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// Frequency and excited-state gradient along one normal mode, in a unit
/// system where ħ = 1 (atomic units are the usual choice).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientInput {
    pub omega: f64,
    pub gradient: f64,
}

/// Displacement between the two minima along a mode, `ΔQ = G / ω`.
pub fn displacement(g: GradientInput) -> Result<f64> {
    if !g.omega.is_finite() || g.omega <= 0.0 {
        return Err(Error::InvalidInput(alloc::format!(
            "omega must be positive and finite, got {}",
            g.omega
        )));
    }
    if !g.gradient.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "gradient must be finite, got {}",
            g.gradient
        )));
    }
    Ok(g.gradient / g.omega)
}

/// Huang-Rhys factor `S = ω ΔQ² / 2` with `ΔQ = G / ω` (ħ = 1), which
/// reduces to `G² / (2ω)`.
///
/// Note: the usual mass-weighted displaced-oscillator derivation gives
/// `ΔQ = G / ω²`. This function keeps the `G / ω` convention; [`displacement`]
/// is the single place to change it.
pub fn hr_from_gradient(g: GradientInput) -> Result<f64> {
    let dq = displacement(g)?;
    Ok(0.5 * g.omega * dq * dq)
}

/// One broken invariant, located by mode index where applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub mode: Option<usize>,
    pub field: &'static str,
    pub rule: &'static str,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Some(i) => write!(
                f,
                "mode {i}: {} = {} violates {}",
                self.field, self.value, self.rule
            ),
            None => write!(f, "{} = {} violates {}", self.field, self.value, self.rule),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Non-fatal findings from [`validate_molecule`].
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// No modes: the spectrum is the bare 0-0 line.
    ZeroPhononOnly,
    /// Mode whose Huang-Rhys factor is at or below the pruning threshold.
    BelowPruneThreshold { mode: usize, huang_rhys: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ZeroPhononOnly => f.write_str("molecule has no modes; only the 0-0 line"),
            Warning::BelowPruneThreshold { mode, huang_rhys } => {
                write!(f, "mode {mode}: huang_rhys = {huang_rhys} is below the pruning threshold")
            }
        }
    }
}

/// Checks every molecule invariant and collects all violations at once.
///
/// On success returns the warnings: an empty mode list, and modes whose
/// Huang-Rhys factor is `<= prune_threshold`.
pub fn validate_molecule(m: &Molecule, prune_threshold: f64) -> Result<Vec<Warning>> {
    let mut report = ValidationReport::default();
    let mut warnings = Vec::new();

    if !m.e00.is_finite() || m.e00 < 0.0 {
        report.violations.push(Violation {
            mode: None,
            field: "e00",
            rule: "e00 >= 0 and finite",
            value: m.e00,
        });
    }

    for (pos, mode) in m.modes.iter().enumerate() {
        if mode.index != pos + 1 {
            report.violations.push(Violation {
                mode: Some(mode.index),
                field: "index",
                rule: "indices unique and contiguous from 1",
                value: mode.index as f64,
            });
        }
        if !mode.energy.is_finite() || mode.energy <= 0.0 {
            report.violations.push(Violation {
                mode: Some(mode.index),
                field: "energy",
                rule: "energy > 0",
                value: mode.energy,
            });
        }
        if !mode.huang_rhys.is_finite() || mode.huang_rhys < 0.0 {
            report.violations.push(Violation {
                mode: Some(mode.index),
                field: "huang_rhys",
                rule: "huang_rhys >= 0 and finite",
                value: mode.huang_rhys,
            });
        } else if mode.huang_rhys <= prune_threshold {
            warnings.push(Warning::BelowPruneThreshold {
                mode: mode.index,
                huang_rhys: mode.huang_rhys,
            });
        }
    }

    if let Some(atoms) = m.atom_count {
        let max_modes = (3 * atoms).saturating_sub(5);
        if atoms == 0 || m.modes.len() > max_modes {
            report.violations.push(Violation {
                mode: None,
                field: "atom_count",
                rule: "mode count <= 3M - 5",
                value: atoms as f64,
            });
        }
    }

    if !report.violations.is_empty() {
        return Err(Error::Validation(report));
    }
    if m.modes.is_empty() {
        warnings.insert(0, Warning::ZeroPhononOnly);
    }
    Ok(warnings)
}

/// Keeps only modes with `S > threshold`, preserving order and renumbering
/// indices from 1.
pub fn prune_modes(m: &Molecule, threshold: f64) -> Molecule {
    let modes = m
        .modes
        .iter()
        .filter(|mode| mode.huang_rhys > threshold)
        .enumerate()
        .map(|(i, mode)| Mode {
            index: i + 1,
            ..*mode
        })
        .collect();
    Molecule {
        modes,
        ..m.clone()
    }
}
