//! Fidelity of sampled spectra against the exact reference as the number of
//! events grows.

use alloc::vec::Vec;

use crate::fidelity::{fidelity, FidelityNorm};
use crate::model::Molecule;
use crate::sampler::{sample_spectrum, DetectorModel, SamplerConfig};
use crate::sos::{build_reference_spectrum, SosConfig};
use crate::spectrum::LineSpectrum;
use crate::stream::derive_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub event_counts: Vec<u64>,
    pub mean_fidelity: Vec<f64>,
    /// Sample standard deviation over runs; zero for a single run.
    pub std_fidelity: Vec<f64>,
    pub runs: usize,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Seed of run `run` at `events` events, derived from the base seed.
pub fn run_seed(base: u64, events: u64, run: usize) -> u64 {
    derive_seed(base, events, run as u64)
}

fn run_fidelity(
    m: &Molecule,
    cfg: &SamplerConfig,
    d: &DetectorModel,
    reference: &LineSpectrum,
    norm: FidelityNorm,
) -> Result<f64> {
    let sampled = sample_spectrum(m, cfg, d)?.to_line_spectrum();
    fidelity(&sampled, reference, norm)
}

/// For every event count, samples `runs` spectra with independent seeds and
/// reports the mean and spread of their fidelity to the reference.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    m: &Molecule,
    base: &SamplerConfig,
    d: &DetectorModel,
    event_counts: &[u64],
    runs: usize,
    sos: &SosConfig,
    norm: FidelityNorm,
) -> Result<ConvergenceReport> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be >= 1".into()));
    }
    let reference = build_reference_spectrum(m, sos)?;
    convergence_against(m, base, d, event_counts, runs, &reference, norm)
}

/// [`convergence_study`] against a precomputed reference.
pub fn convergence_against(
    m: &Molecule,
    base: &SamplerConfig,
    d: &DetectorModel,
    event_counts: &[u64],
    runs: usize,
    reference: &LineSpectrum,
    norm: FidelityNorm,
) -> Result<ConvergenceReport> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be >= 1".into()));
    }
    let mut report = ConvergenceReport {
        event_counts: event_counts.to_vec(),
        mean_fidelity: Vec::with_capacity(event_counts.len()),
        std_fidelity: Vec::with_capacity(event_counts.len()),
        runs,
    };
    for &events in event_counts {
        let cfg_for = |r: usize| SamplerConfig {
            events,
            seed: run_seed(base.seed, events, r),
            ..base.clone()
        };

        #[cfg(feature = "parallel")]
        let values: Vec<f64> = {
            use rayon::prelude::*;
            (0..runs)
                .into_par_iter()
                .map(|r| run_fidelity(m, &cfg_for(r), d, reference, norm))
                .collect::<Result<_>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let values: Vec<f64> = (0..runs)
            .map(|r| run_fidelity(m, &cfg_for(r), d, reference, norm))
            .collect::<Result<_>>()?;

        let (mean, std) = mean_std(&values);
        report.mean_fidelity.push(mean);
        report.std_fidelity.push(std);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc::CutoffRule;
    use crate::model::Transition;

    #[test]
    fn statistics() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn single_run_has_zero_spread() {
        let m = Molecule::from_pairs("m", 0.0, Transition::Absorption, &[(300.0, 0.2), (700.0, 0.1)]);
        let r = convergence_study(
            &m,
            &SamplerConfig::new(1, 9).with_max_quanta(1),
            &DetectorModel::ideal(),
            &[100, 1000],
            1,
            &SosConfig::new(1).with_cutoff(CutoffRule::Cap),
            FidelityNorm::L2,
        )
        .unwrap();
        assert_eq!(r.std_fidelity, alloc::vec![0.0, 0.0]);
        assert!(r.mean_fidelity.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn zero_runs_rejected() {
        let m = Molecule::from_pairs("m", 0.0, Transition::Absorption, &[(300.0, 0.2)]);
        assert!(convergence_study(
            &m,
            &SamplerConfig::new(1, 9),
            &DetectorModel::ideal(),
            &[10],
            0,
            &SosConfig::new(1),
            FidelityNorm::L2,
        )
        .is_err());
    }
}
