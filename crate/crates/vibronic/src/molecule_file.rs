//! JSON molecule description.
//!
//! ```json
//! {
//!   "name": "example",
//!   "e00_cm1": 18650.0,
//!   "transition": "absorption",
//!   "atom_count": 36,
//!   "modes": [
//!     { "energy_cm1": 264.0, "huang_rhys": 0.25 },
//!     { "energy_cm1": 1180.0, "omega": 0.0054, "gradient": 0.0012 }
//!   ]
//! }
//! ```
//!
//! A mode gives either `huang_rhys` or both `omega` and `gradient`, in which
//! case `S = G² / (2ω)` with ħ = 1 (atomic units). Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vibronic_core::model::{hr_from_gradient, validate_molecule, GradientInput, Mode, Molecule, Transition};

use crate::{IoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionName {
    Absorption,
    Emission,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub energy_cm1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub huang_rhys: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeFile {
    pub name: String,
    pub e00_cm1: f64,
    pub transition: TransitionName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_count: Option<usize>,
    pub modes: Vec<ModeEntry>,
}

impl ModeEntry {
    fn huang_rhys(&self, index: usize) -> Result<f64> {
        let err = |message: &str| IoError::Mode {
            index,
            message: message.to_string(),
        };
        match (self.huang_rhys, self.omega, self.gradient) {
            (Some(s), None, None) => Ok(s),
            (None, Some(omega), Some(gradient)) => hr_from_gradient(GradientInput { omega, gradient })
                .map_err(|e| err(&e.to_string())),
            (Some(_), _, _) => Err(err("give either huang_rhys or omega + gradient, not both")),
            (None, None, None) => Err(err("missing huang_rhys (or omega + gradient)")),
            (None, _, _) => Err(err("omega and gradient must be given together")),
        }
    }
}

impl MoleculeFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves Huang-Rhys factors and checks every molecule invariant.
    pub fn to_molecule(&self) -> Result<Molecule> {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| Ok(Mode::new(i + 1, m.energy_cm1, m.huang_rhys(i + 1)?)))
            .collect::<Result<Vec<_>>>()?;
        let molecule = Molecule {
            name: self.name.clone(),
            e00: self.e00_cm1,
            transition: match self.transition {
                TransitionName::Absorption => Transition::Absorption,
                TransitionName::Emission => Transition::Emission,
            },
            modes,
            atom_count: self.atom_count,
        };
        validate_molecule(&molecule, 0.0)?;
        Ok(molecule)
    }

    pub fn from_molecule(m: &Molecule) -> Self {
        Self {
            name: m.name.clone(),
            e00_cm1: m.e00,
            transition: match m.transition {
                Transition::Absorption => TransitionName::Absorption,
                Transition::Emission => TransitionName::Emission,
            },
            atom_count: m.atom_count,
            modes: m
                .modes
                .iter()
                .map(|mode| ModeEntry {
                    energy_cm1: mode.energy,
                    huang_rhys: Some(mode.huang_rhys),
                    omega: None,
                    gradient: None,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("molecule file serializes")
    }
}

/// Reads, resolves and validates a molecule file.
pub fn load_molecule(path: impl AsRef<Path>) -> Result<Molecule> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    MoleculeFile::parse(&text)?.to_molecule()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"{
        "name": "basic",
        "e00_cm1": 18000.0,
        "transition": "emission",
        "atom_count": 36,
        "modes": [
            { "energy_cm1": 264.0, "huang_rhys": 0.25 },
            { "energy_cm1": 1180.0, "omega": 2.0, "gradient": 2.0 }
        ]
    }"#;

    #[test]
    fn parses_both_mode_forms() {
        let m = MoleculeFile::parse(BASIC).unwrap().to_molecule().unwrap();
        assert_eq!(m.transition, Transition::Emission);
        assert_eq!(m.atom_count, Some(36));
        assert_eq!(m.modes[0].huang_rhys, 0.25);
        assert_eq!(m.modes[1].huang_rhys, 1.0);
        assert_eq!(m.modes[1].index, 2);
    }

    #[test]
    fn unknown_top_level_key_is_named() {
        let text = BASIC.replacen("\"name\"", "\"colour\": 1, \"name\"", 1);
        let err = MoleculeFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn both_forms_on_one_mode_rejected() {
        let text = BASIC.replace(
            r#"{ "energy_cm1": 264.0, "huang_rhys": 0.25 }"#,
            r#"{ "energy_cm1": 264.0, "huang_rhys": 0.25, "gradient": 0.1, "omega": 1.0 }"#,
        );
        let err = MoleculeFile::parse(&text).unwrap().to_molecule().unwrap_err();
        assert!(matches!(err, IoError::Mode { index: 1, .. }), "{err}");
        assert!(err.to_string().starts_with("mode 1"));
    }

    #[test]
    fn incomplete_gradient_form_rejected() {
        let text = BASIC.replace(r#""omega": 2.0, "#, "");
        let err = MoleculeFile::parse(&text).unwrap().to_molecule().unwrap_err();
        assert!(matches!(err, IoError::Mode { index: 2, .. }), "{err}");
    }

    #[test]
    fn bad_omega_rejected() {
        let text = BASIC.replace(r#""omega": 2.0"#, r#""omega": -2.0"#);
        assert!(MoleculeFile::parse(&text).unwrap().to_molecule().is_err());
    }

    #[test]
    fn invariants_checked() {
        let text = BASIC.replace("264.0", "-10.0");
        let err = MoleculeFile::parse(&text).unwrap().to_molecule().unwrap_err();
        assert!(err.to_string().contains("energy > 0"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let m = MoleculeFile::parse(BASIC).unwrap().to_molecule().unwrap();
        let again = MoleculeFile::parse(&MoleculeFile::from_molecule(&m).to_json())
            .unwrap()
            .to_molecule()
            .unwrap();
        assert_eq!(m, again);
    }
}
