//! Linear-scaling spectrum sampler.
//!
//! Each mode is an attenuated coherent source whose mean photon number equals
//! the mode's Huang-Rhys factor. For every event, one photon count is drawn per
//! mode, passed through the detector model, weighted by the mode energy and
//! summed; the histogram of those sums is the Franck-Condon profile. Work is
//! `O(P * N)`.
//!
//! Events are processed in chunks of [`SamplerConfig::chunk_size`]. The random
//! stream for mode `i` in chunk `c` is [`substream`]`(seed, i, c)`, so the result
//! is a pure function of the inputs and the chunk size, never of scheduling.

use alloc::vec::Vec;

use hashbrown::HashMap;
use rand_core::RngCore;

use crate::model::{validate_molecule, Molecule};
use crate::poisson::{binomial_thin, PoissonTable};
use crate::spectrum::{Provenance, SampledSpectrum, DEFAULT_MERGE_TOLERANCE};
use crate::stream::{substream, GENERATOR};
use crate::{Error, Result};

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Number of events `P`; every mode contributes one draw per event.
    pub events: u64,
    pub seed: u64,
    /// Recorded counts above this are capped. `None` leaves them unbounded.
    pub max_quanta: Option<u32>,
    pub chunk_size: u64,
}

impl SamplerConfig {
    pub fn new(events: u64, seed: u64) -> Self {
        Self {
            events,
            seed,
            max_quanta: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_max_quanta(mut self, k: u32) -> Self {
        self.max_quanta = Some(k);
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.events == 0 {
            return Err(Error::InvalidInput("events must be >= 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidInput("chunk_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn chunks(&self) -> u64 {
        self.events.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, chunk: u64) -> usize {
        let start = chunk * self.chunk_size;
        (self.events - start).min(self.chunk_size) as usize
    }
}

/// How photon loss is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Thinning {
    /// Draw the detected count directly from `Poisson(η S + dark)`.
    #[default]
    Direct,
    /// Draw `Poisson(S)` photons, keep each with probability η, then add dark
    /// counts. Same distribution as `Direct`, more random numbers.
    PerPhoton,
}

/// Photon detector: efficiency, dark counts and click (threshold) behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// Mean dark counts per detection window.
    pub dark_mean: f64,
    /// Record any nonzero count as 1.
    pub threshold: bool,
    pub thinning: Thinning,
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dark_mean: 0.0,
            threshold: false,
            thinning: Thinning::Direct,
        }
    }

    pub fn threshold() -> Self {
        Self {
            threshold: true,
            ..Self::ideal()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidInput(alloc::format!(
                "efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.dark_mean >= 0.0 && self.dark_mean.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!(
                "dark count mean must be finite and >= 0, got {}",
                self.dark_mean
            )));
        }
        Ok(())
    }

    /// Largest count the detector itself can report.
    fn ceiling(&self) -> Option<u32> {
        self.threshold.then_some(1)
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

fn cap(count: u32, limit: Option<u32>) -> u32 {
    match limit {
        Some(k) => count.min(k),
        None => count,
    }
}

fn min_cap(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Passes `photons` through the detector: each photon survives with
/// probability η, dark counts are added, then a click detector saturates at 1.
pub fn apply_detector(photons: u32, d: &DetectorModel, rng: &mut impl RngCore) -> u32 {
    let mut count = binomial_thin(photons, d.efficiency, rng);
    if d.dark_mean > 0.0 {
        // Table construction cannot fail: dark_mean is checked finite and >= 0.
        count += PoissonTable::new(d.dark_mean, None)
            .map(|t| t.draw(rng))
            .unwrap_or(0);
    }
    cap(count, d.ceiling())
}

/// Per-mode draw recipe shared by every chunk.
#[derive(Debug, Clone)]
enum ModeDraw {
    /// Always zero; no random numbers are consumed.
    Silent,
    Direct(PoissonTable),
    PerPhoton {
        photons: PoissonTable,
        dark: PoissonTable,
        efficiency: f64,
        limit: Option<u32>,
    },
}

impl ModeDraw {
    fn new(s: f64, max_quanta: Option<u32>, d: &DetectorModel) -> Result<Self> {
        let limit = min_cap(max_quanta, d.ceiling());
        if (s == 0.0 && d.dark_mean == 0.0) || limit == Some(0) {
            return Ok(ModeDraw::Silent);
        }
        Ok(match d.thinning {
            Thinning::Direct => {
                ModeDraw::Direct(PoissonTable::new(d.efficiency * s + d.dark_mean, limit)?)
            }
            Thinning::PerPhoton => ModeDraw::PerPhoton {
                photons: PoissonTable::new(s, None)?,
                dark: PoissonTable::new(d.dark_mean, None)?,
                efficiency: d.efficiency,
                limit,
            },
        })
    }

    #[inline]
    fn draw(&self, rng: &mut impl RngCore) -> u32 {
        match self {
            ModeDraw::Silent => 0,
            ModeDraw::Direct(t) => t.draw(rng),
            ModeDraw::PerPhoton {
                photons,
                dark,
                efficiency,
                limit,
            } => {
                let n = photons.draw(rng);
                let kept = binomial_thin(n, *efficiency, rng);
                cap(kept + dark.draw(rng), *limit)
            }
        }
    }

    fn fill(&self, seed: u64, lane: u64, chunk: u64, out: &mut [u32]) {
        if let ModeDraw::Silent = self {
            out.fill(0);
            return;
        }
        let mut rng = substream(seed, lane, chunk);
        for slot in out {
            *slot = self.draw(&mut rng);
        }
    }
}

/// `P` recorded counts for one mode (the mode's position is `lane`).
pub fn sample_mode(
    s: f64,
    lane: usize,
    cfg: &SamplerConfig,
    d: &DetectorModel,
) -> Result<Vec<u32>> {
    cfg.check()?;
    d.check()?;
    let draw = ModeDraw::new(s, cfg.max_quanta, d)?;
    let mut out = alloc::vec![0u32; cfg.events as usize];
    for (chunk, slice) in out.chunks_mut(cfg.chunk_size as usize).enumerate() {
        draw.fill(cfg.seed, lane as u64, chunk as u64, slice);
    }
    Ok(out)
}

struct Plan {
    e00: f64,
    steps: Vec<f64>,
    draws: Vec<ModeDraw>,
}

impl Plan {
    fn new(m: &Molecule, cfg: &SamplerConfig, d: &DetectorModel) -> Result<Self> {
        cfg.check()?;
        d.check()?;
        validate_molecule(m, 0.0)?;
        let sign = m.transition.sign();
        Ok(Self {
            e00: m.e00,
            steps: m.modes.iter().map(|mode| sign * mode.energy).collect(),
            draws: m
                .modes
                .iter()
                .map(|mode| ModeDraw::new(mode.huang_rhys, cfg.max_quanta, d))
                .collect::<Result<_>>()?,
        })
    }

    /// Adds the events of `chunk` to `hist`, keyed by energy bits.
    fn run_chunk(
        &self,
        cfg: &SamplerConfig,
        chunk: u64,
        energies: &mut Vec<f64>,
        counts: &mut Vec<u32>,
        hist: &mut HashMap<u64, u64>,
    ) {
        let len = cfg.chunk_len(chunk);
        energies.clear();
        energies.resize(len, self.e00);
        counts.resize(len, 0);
        for (lane, (draw, &step)) in self.draws.iter().zip(&self.steps).enumerate() {
            if let ModeDraw::Silent = draw {
                continue;
            }
            draw.fill(cfg.seed, lane as u64, chunk, &mut counts[..len]);
            for (e, &j) in energies.iter_mut().zip(counts.iter()) {
                if j > 0 {
                    *e += step * f64::from(j);
                }
            }
        }
        for e in energies.iter() {
            *hist.entry(e.to_bits()).or_insert(0) += 1;
        }
    }
}

fn finish(
    m: &Molecule,
    cfg: &SamplerConfig,
    d: &DetectorModel,
    hist: HashMap<u64, u64>,
) -> SampledSpectrum {
    let mut lines: Vec<(f64, u64)> = hist
        .into_iter()
        .map(|(bits, c)| (f64::from_bits(bits), c))
        .collect();
    lines.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts: Vec<(f64, u64)> = Vec::with_capacity(lines.len());
    for (e, c) in lines {
        match counts.last_mut() {
            Some(last) if e - last.0 <= DEFAULT_MERGE_TOLERANCE => last.1 += c,
            _ => counts.push((e, c)),
        }
    }

    let mut prov = Provenance::new();
    prov.push("source", "poisson-sampler")
        .push("molecule", &m.name)
        .push("modes", m.mode_count())
        .push("events", cfg.events)
        .push("seed", cfg.seed)
        .push("generator", GENERATOR)
        .push("chunk_size", cfg.chunk_size);
    match cfg.max_quanta {
        Some(k) => prov.push("max_quanta", k),
        None => prov.push("max_quanta", "unbounded"),
    };
    prov.push("efficiency", d.efficiency)
        .push("dark_mean", d.dark_mean)
        .push("threshold", d.threshold);

    SampledSpectrum {
        counts,
        total_events: cfg.events,
        zero_phonon: Some(m.e00),
        provenance: prov,
    }
}

/// Samples `cfg.events` transitions on the current thread.
pub fn sample_spectrum(
    m: &Molecule,
    cfg: &SamplerConfig,
    d: &DetectorModel,
) -> Result<SampledSpectrum> {
    let plan = Plan::new(m, cfg, d)?;
    let mut hist = HashMap::new();
    let mut energies = Vec::new();
    let mut counts = Vec::new();
    for chunk in 0..cfg.chunks() {
        plan.run_chunk(cfg, chunk, &mut energies, &mut counts, &mut hist);
    }
    Ok(finish(m, cfg, d, hist))
}

/// Same result as [`sample_spectrum`], computed on `threads` workers.
#[cfg(feature = "parallel")]
pub fn sample_spectrum_parallel(
    m: &Molecule,
    cfg: &SamplerConfig,
    d: &DetectorModel,
    threads: usize,
) -> Result<SampledSpectrum> {
    use rayon::prelude::*;

    let plan = Plan::new(m, cfg, d)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(alloc::format!("thread pool: {e}")))?;
    let hist = pool.install(|| {
        (0..cfg.chunks())
            .into_par_iter()
            .fold(
                || (HashMap::new(), Vec::new(), Vec::new()),
                |(mut hist, mut energies, mut counts), chunk| {
                    plan.run_chunk(cfg, chunk, &mut energies, &mut counts, &mut hist);
                    (hist, energies, counts)
                },
            )
            .map(|(hist, _, _)| hist)
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            })
    });
    Ok(finish(m, cfg, d, hist))
}
