//! Exact sum-over-states reference spectra.
//!
//! Every configuration in `{0..=K}^N` is visited in mixed-radix order (last
//! mode fastest) and its Franck-Condon factor and transition energy are
//! accumulated into a stick spectrum.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::fc::{mode_weights, CutoffRule};
use crate::model::{validate_molecule, Mode, Molecule, VibrationalConfiguration};
use crate::spectrum::{LineSpectrum, Normalization, Provenance, Stick, DEFAULT_MERGE_TOLERANCE};
use crate::{Error, Result};

/// Default refusal threshold for `(1 + K)^N`.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SosConfig {
    /// Per-mode cutoff `K`.
    pub max_quanta: u32,
    /// Skip any subtree whose partial Franck-Condon product is below this.
    pub fc_prune: Option<f64>,
    /// Sticks closer than this (cm⁻¹) are merged.
    pub merge_tolerance: f64,
    pub budget: u64,
    pub cutoff: CutoffRule,
    pub normalization: Normalization,
}

impl SosConfig {
    pub fn new(max_quanta: u32) -> Self {
        Self {
            max_quanta,
            ..Self::default()
        }
    }

    pub fn with_cutoff(mut self, cutoff: CutoffRule) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_fc_prune(mut self, fc_prune: f64) -> Self {
        self.fc_prune = Some(fc_prune);
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    fn check(&self) -> Result<()> {
        if let Some(p) = self.fc_prune {
            if p.is_nan() || p < 0.0 {
                return Err(Error::InvalidInput(alloc::format!(
                    "fc_prune must be >= 0, got {p}"
                )));
            }
        }
        if self.merge_tolerance.is_nan() || self.merge_tolerance < 0.0 {
            return Err(Error::InvalidInput(alloc::format!(
                "merge_tolerance must be >= 0, got {}",
                self.merge_tolerance
            )));
        }
        Ok(())
    }
}

impl Default for SosConfig {
    fn default() -> Self {
        Self {
            max_quanta: 1,
            fc_prune: None,
            merge_tolerance: DEFAULT_MERGE_TOLERANCE,
            budget: DEFAULT_ENUMERATION_BUDGET,
            cutoff: CutoffRule::Truncate,
            normalization: Normalization::Raw,
        }
    }
}

/// `(1 + K)^N`, or `None` if it does not fit in 128 bits.
pub fn state_count_exact(n_modes: usize, max_quanta: u32) -> Option<u128> {
    let base = u128::from(max_quanta) + 1;
    let mut count: u128 = 1;
    for _ in 0..n_modes {
        count = count.checked_mul(base)?;
    }
    Some(count)
}

/// `(1 + K)^N`, refused when it exceeds `budget`.
pub fn state_count(n_modes: usize, max_quanta: u32, budget: u64) -> Result<u64> {
    match state_count_exact(n_modes, max_quanta) {
        Some(n) if n <= u128::from(budget) => Ok(n as u64),
        count => Err(Error::EnumerationBudget { count, budget }),
    }
}

/// One enumerated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub config: VibrationalConfiguration,
    pub fc: f64,
    pub energy: f64,
}

/// Depth-first walk over `{0..=K}^N` keeping prefix products and energies.
pub struct Enumerator {
    weights: Vec<Vec<f64>>,
    steps: Vec<f64>,
    max_quanta: u32,
    prune: f64,
    digits: Vec<u32>,
    prod: Vec<f64>,
    energy: Vec<f64>,
    started: bool,
    done: bool,
}

impl Enumerator {
    fn new(m: &Molecule, modes: &[Mode], cfg: &SosConfig) -> Result<Self> {
        cfg.check()?;
        let n = modes.len();
        let sign = m.transition.sign();
        let weights = modes
            .iter()
            .map(|mode| mode_weights(mode.huang_rhys, cfg.max_quanta, cfg.cutoff))
            .collect::<Result<Vec<_>>>()?;
        let mut prod = alloc::vec![0.0; n + 1];
        prod[0] = 1.0;
        let mut energy = alloc::vec![0.0; n + 1];
        energy[0] = m.e00;
        Ok(Self {
            weights,
            steps: modes.iter().map(|mode| sign * mode.energy).collect(),
            max_quanta: cfg.max_quanta,
            prune: cfg.fc_prune.unwrap_or(0.0),
            digits: alloc::vec![0; n],
            prod,
            energy,
            started: false,
            done: false,
        })
    }

    /// Increments the digit at `depth` with carry, zeroing deeper digits.
    /// Returns the shallowest depth whose prefix must be recomputed.
    fn advance(&mut self, mut depth: usize) -> Option<usize> {
        loop {
            self.digits[depth] += 1;
            for d in &mut self.digits[depth + 1..] {
                *d = 0;
            }
            if self.digits[depth] <= self.max_quanta {
                return Some(depth);
            }
            self.digits[depth] = 0;
            if depth == 0 {
                return None;
            }
            depth -= 1;
        }
    }

    /// Extends prefixes from `depth` down to a leaf, skipping pruned subtrees.
    fn settle(&mut self, mut depth: usize) -> bool {
        let n = self.digits.len();
        while depth < n {
            let j = self.digits[depth];
            let p = self.prod[depth] * self.weights[depth][j as usize];
            if p < self.prune {
                match self.advance(depth) {
                    Some(d) => {
                        depth = d;
                        continue;
                    }
                    None => return false,
                }
            }
            self.prod[depth + 1] = p;
            self.energy[depth + 1] = if j > 0 {
                self.energy[depth] + self.steps[depth] * f64::from(j)
            } else {
                self.energy[depth]
            };
            depth += 1;
        }
        true
    }

    /// Next `(quanta, fc, energy)` without allocating.
    pub fn next_term(&mut self) -> Option<(&[u32], f64, f64)> {
        if self.done {
            return None;
        }
        let found = if !self.started {
            self.started = true;
            self.settle(0)
        } else {
            match self.digits.len().checked_sub(1).and_then(|d| self.advance(d)) {
                Some(d) => self.settle(d),
                None => false,
            }
        };
        if !found {
            self.done = true;
            return None;
        }
        let n = self.digits.len();
        Some((&self.digits, self.prod[n], self.energy[n]))
    }
}

impl Iterator for Enumerator {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        self.next_term().map(|(q, fc, energy)| Term {
            config: VibrationalConfiguration(q.to_vec()),
            fc,
            energy,
        })
    }
}

/// Streams every configuration up to the cutoff in mixed-radix order.
///
/// With `fc_prune` set, a subtree is skipped as soon as its partial product
/// drops below the threshold; every remaining factor is at most one, so
/// nothing above the threshold is lost.
pub fn enumerate_configurations(m: &Molecule, cfg: &SosConfig) -> Result<Enumerator> {
    state_count(m.mode_count(), cfg.max_quanta, cfg.budget)?;
    Enumerator::new(m, &m.modes, cfg)
}

/// A reference spectrum with enumeration statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub spectrum: LineSpectrum,
    /// `(1 + K)^N` over the modes that were enumerated.
    pub state_count: u64,
    /// Configurations actually visited (fewer when pruning).
    pub visited: u64,
    /// Raw Franck-Condon mass captured before normalization.
    pub captured: f64,
}

/// Modes sorted into a canonical order, with undisplaced (`S = 0`) modes
/// removed. Their factor is exactly one for `j = 0` and zero otherwise.
fn canonical_modes(m: &Molecule) -> Vec<Mode> {
    let mut modes: Vec<Mode> = m
        .modes
        .iter()
        .copied()
        .filter(|mode| mode.huang_rhys != 0.0)
        .collect();
    modes.sort_by(|a, b| {
        a.huang_rhys
            .total_cmp(&b.huang_rhys)
            .then(a.energy.total_cmp(&b.energy))
    });
    modes
}

/// Builds the exact stick spectrum and reports what it cost.
///
/// Modes are enumerated in a canonical order, so permuting the input modes
/// gives a bit-identical spectrum; modes with `S = 0` are skipped.
pub fn build_reference(m: &Molecule, cfg: &SosConfig) -> Result<Reference> {
    validate_molecule(m, 0.0)?;
    let modes = canonical_modes(m);
    let count = state_count(modes.len(), cfg.max_quanta, cfg.budget)?;
    let mut walk = Enumerator::new(m, &modes, cfg)?;

    let mut lines: HashMap<u64, f64> = HashMap::new();
    let mut visited = 0u64;
    while let Some((_, fc, energy)) = walk.next_term() {
        visited += 1;
        if fc > 0.0 {
            *lines.entry(energy.to_bits()).or_insert(0.0) += fc;
        }
    }
    let sticks: Vec<Stick> = lines
        .into_iter()
        .map(|(bits, i)| Stick::new(f64::from_bits(bits), i))
        .collect();
    let mut raw = LineSpectrum::from_sticks(sticks, cfg.merge_tolerance).with_zero_phonon(m.e00);
    let captured = raw.total_intensity();

    let mut prov = Provenance::new();
    prov.push("source", "sum-over-states")
        .push("molecule", &m.name)
        .push("modes", modes.len())
        .push("max_quanta", cfg.max_quanta)
        .push(
            "cutoff",
            match cfg.cutoff {
                CutoffRule::Truncate => "truncate",
                CutoffRule::Cap => "cap",
            },
        );
    if let Some(p) = cfg.fc_prune {
        prov.push("fc_prune", p);
    }
    prov.push("state_count", count)
        .push("captured_intensity", captured);
    raw.provenance = prov;

    Ok(Reference {
        spectrum: raw.normalize(cfg.normalization)?,
        state_count: count,
        visited,
        captured,
    })
}

pub fn build_reference_spectrum(m: &Molecule, cfg: &SosConfig) -> Result<LineSpectrum> {
    build_reference(m, cfg).map(|r| r.spectrum)
}
