//! Spectrum CSV: optional `# key: value` provenance lines, the header
//! `energy_cm1,intensity`, then one row per stick or grid point.
//!
//! Floats are written in shortest round-trip form, so parse followed by write
//! reproduces a file byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use vibronic_core::spectrum::{LineSpectrum, Normalization, Stick};

use crate::{IoError, Result};

pub const HEADER: &str = "energy_cm1,intensity";

const E00_KEY: &str = "e00_cm1";
const NORMALIZATION_KEY: &str = "normalization";

/// Renders a spectrum; LF line endings, trailing newline.
pub fn write_spectrum(spec: &LineSpectrum) -> String {
    let mut out = String::new();
    if let Some(e00) = spec.zero_phonon {
        let _ = writeln!(out, "# {E00_KEY}: {e00}");
    }
    let _ = writeln!(out, "# {NORMALIZATION_KEY}: {}", spec.normalization);
    for (key, value) in &spec.provenance.entries {
        match value {
            Some(v) => {
                let _ = writeln!(out, "# {key}: {v}");
            }
            None => {
                let _ = writeln!(out, "# {key}");
            }
        }
    }
    out.push_str(HEADER);
    out.push('\n');
    for s in &spec.sticks {
        let _ = writeln!(out, "{},{}", s.energy, s.intensity);
    }
    out
}

fn csv_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Csv {
        line,
        message: message.into(),
    }
}

/// Parses a spectrum, checking the header and strictly increasing energies.
pub fn parse_spectrum(text: &str) -> Result<LineSpectrum> {
    let mut spec = LineSpectrum::default();
    let mut seen_e00 = false;
    let mut seen_norm = false;
    let mut header_seen = false;

    let body = text.strip_suffix('\n').unwrap_or(text);
    for (i, line) in body.split('\n').enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            return Err(csv_err(lineno, "empty line"));
        }
        if !header_seen {
            if let Some(comment) = line.strip_prefix("# ") {
                match comment.split_once(": ") {
                    Some((E00_KEY, v)) if !seen_e00 && !seen_norm => {
                        seen_e00 = true;
                        spec.zero_phonon = Some(
                            v.parse()
                                .map_err(|_| csv_err(lineno, format!("bad {E00_KEY} '{v}'")))?,
                        );
                    }
                    Some((NORMALIZATION_KEY, v)) if !seen_norm => {
                        seen_norm = true;
                        spec.normalization = v
                            .parse::<Normalization>()
                            .map_err(|e| csv_err(lineno, e.to_string()))?;
                    }
                    Some((k, v)) => {
                        spec.provenance.entries.push((k.to_string(), Some(v.to_string())));
                    }
                    None => {
                        spec.provenance.entries.push((comment.to_string(), None));
                    }
                }
                continue;
            }
            if line != HEADER {
                return Err(csv_err(lineno, format!("expected header '{HEADER}', got '{line}'")));
            }
            header_seen = true;
            continue;
        }
        let (e, v) = line
            .split_once(',')
            .ok_or_else(|| csv_err(lineno, "expected two comma-separated values"))?;
        let energy: f64 = e
            .parse()
            .map_err(|_| csv_err(lineno, format!("bad energy '{e}'")))?;
        let intensity: f64 = v
            .parse()
            .map_err(|_| csv_err(lineno, format!("bad intensity '{v}'")))?;
        if let Some(last) = spec.sticks.last() {
            if energy.partial_cmp(&last.energy) != Some(std::cmp::Ordering::Greater) {
                return Err(csv_err(lineno, "energies must be strictly increasing"));
            }
        }
        spec.sticks.push(Stick::new(energy, intensity));
    }
    if !header_seen {
        return Err(csv_err(1, format!("missing header '{HEADER}'")));
    }
    Ok(spec)
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<LineSpectrum> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_spectrum(&text)
}

pub fn write_spectrum_file(path: impl AsRef<Path>, spec: &LineSpectrum) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_spectrum(spec)).map_err(|e| IoError::io(path, e))
}
