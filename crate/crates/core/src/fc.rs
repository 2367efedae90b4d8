//! Franck-Condon factors and transition energies in the linear coupling model.
//!
//! Each mode is an independent displaced oscillator, so the multi-mode factor
//! is a product of one-dimensional Poisson weights `S^j e^{-S} / j!`.

use alloc::vec::Vec;

use crate::model::{Molecule, VibrationalConfiguration};
use crate::{Error, Result};

/// Above this quantum number the weight is evaluated through `ln Γ`.
const DIRECT_LIMIT: u32 = 20;

fn check_mean(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 || s.is_infinite() {
        return Err(Error::InvalidInput(alloc::format!(
            "Huang-Rhys factor must be finite and >= 0, got {s}"
        )));
    }
    Ok(())
}

/// `|<0|j>|² = S^j e^{-S} / j!` for one displaced oscillator.
pub fn fc_factor_1d(s: f64, j: u32) -> Result<f64> {
    check_mean(s)?;
    Ok(poisson_pmf(s, j))
}

/// Unchecked Poisson probability mass; `s` must be finite and `>= 0`.
pub(crate) fn poisson_pmf(s: f64, j: u32) -> f64 {
    if s == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    if j <= DIRECT_LIMIT {
        let mut term = 1.0;
        for k in 1..=j {
            term *= s / f64::from(k);
        }
        term * libm::exp(-s)
    } else {
        let j = f64::from(j);
        libm::exp(j * libm::log(s) - s - libm::lgamma(j + 1.0))
    }
}

/// `P(X <= k)` for `X ~ Poisson(s)`, by direct summation.
pub fn poisson_cdf(s: f64, k: u32) -> Result<f64> {
    check_mean(s)?;
    let mut total = 0.0;
    for j in 0..=k {
        total += poisson_pmf(s, j);
    }
    Ok(total.min(1.0))
}

/// `P(X >= k)` for `X ~ Poisson(s)`.
///
/// Sums the tail terms directly when the tail is small, so that tiny tails do
/// not vanish into `1 - cdf` cancellation.
pub fn poisson_upper_tail(s: f64, k: u32) -> Result<f64> {
    check_mean(s)?;
    if k == 0 {
        return Ok(1.0);
    }
    let below = poisson_cdf(s, k - 1)?;
    if below < 0.5 {
        return Ok(1.0 - below);
    }
    let mut total = 0.0;
    let mut j = k;
    loop {
        let term = poisson_pmf(s, j);
        total += term;
        if f64::from(j) > s && term <= total * 1e-18 {
            break;
        }
        if j == u32::MAX {
            break;
        }
        j += 1;
    }
    Ok(total)
}

/// Product of one-dimensional factors over all modes.
pub fn fc_factor_config(m: &Molecule, c: &VibrationalConfiguration) -> Result<f64> {
    m.check_configuration(c)?;
    let mut product = 1.0;
    for (mode, &j) in m.modes.iter().zip(c.quanta()) {
        product *= fc_factor_1d(mode.huang_rhys, j)?;
    }
    Ok(product)
}

/// `E_00 ± Σ E_i j_i`, plus for absorption and minus for emission.
pub fn transition_energy(m: &Molecule, c: &VibrationalConfiguration) -> Result<f64> {
    m.check_configuration(c)?;
    let sign = m.transition.sign();
    let mut energy = m.e00;
    for (mode, &j) in m.modes.iter().zip(c.quanta()) {
        if j > 0 {
            energy += sign * mode.energy * f64::from(j);
        }
    }
    Ok(energy)
}

/// How the per-mode distribution is treated beyond the cutoff `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffRule {
    /// Levels above `K` are dropped; the captured mass is `P(X <= K)`.
    #[default]
    Truncate,
    /// Levels above `K` are folded into level `K`, as a click detector or a
    /// capped random number would do. Each mode's weights sum to one.
    Cap,
}

/// Weights `w[0..=K]` of one mode under `rule`.
pub fn mode_weights(s: f64, max_quanta: u32, rule: CutoffRule) -> Result<Vec<f64>> {
    check_mean(s)?;
    let mut w: Vec<f64> = (0..=max_quanta).map(|j| poisson_pmf(s, j)).collect();
    if rule == CutoffRule::Cap {
        w[max_quanta as usize] = poisson_upper_tail(s, max_quanta)?;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Transition;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn one_dimensional_examples() {
        assert_eq!(fc_factor_1d(0.0, 0).unwrap(), 1.0);
        assert_eq!(fc_factor_1d(0.0, 3).unwrap(), 0.0);
        assert!(close(fc_factor_1d(0.25, 1).unwrap(), 0.194_700_195_767_6, 1e-12));
        assert!(close(fc_factor_1d(1.0, 1).unwrap(), 0.367_879_441_171_442_3, 1e-15));
        assert!(fc_factor_1d(-0.1, 0).is_err());
        assert!(fc_factor_1d(f64::NAN, 0).is_err());
    }

    #[test]
    fn log_space_branch_is_continuous() {
        // j = 20 takes the direct path, j = 21 the lgamma path.
        let s = 7.5;
        let direct_21 = fc_factor_1d(s, 20).unwrap() * s / 21.0;
        let logspace_21 = fc_factor_1d(s, 21).unwrap();
        assert!((direct_21 - logspace_21).abs() / direct_21 < 1e-13);
        // Very large j does not overflow.
        let tiny = fc_factor_1d(2.0, 400).unwrap();
        assert!((0.0..1e-300).contains(&tiny));
    }

    #[test]
    fn config_examples() {
        let m = Molecule::from_pairs("m", 0.0, Transition::Absorption, &[(500.0, 0.5), (900.0, 0.5)]);
        let fc = fc_factor_config(&m, &vec![1, 1].into()).unwrap();
        assert!(close(fc, 0.091_969_860_292_860_58, 1e-14));

        let ground = fc_factor_config(&m, &vec![0, 0].into()).unwrap();
        assert!(close(ground, libm::exp(-1.0), 1e-15));

        let z = Molecule::from_pairs("z", 0.0, Transition::Absorption, &[(500.0, 0.0), (900.0, 0.5)]);
        assert_eq!(fc_factor_config(&z, &vec![1, 0].into()).unwrap(), 0.0);
        assert!(fc_factor_config(&z, &vec![1].into()).is_err());
    }

    #[test]
    fn energy_examples() {
        let a = Molecule::from_pairs("a", 10000.0, Transition::Absorption, &[(500.0, 0.1), (1000.0, 0.1)]);
        assert_eq!(transition_energy(&a, &vec![1, 2].into()).unwrap(), 12500.0);
        assert_eq!(transition_energy(&a, &vec![0, 0].into()).unwrap(), 10000.0);

        let e = Molecule::from_pairs("e", 10000.0, Transition::Emission, &[(500.0, 0.1)]);
        assert_eq!(transition_energy(&e, &vec![2].into()).unwrap(), 9000.0);
        assert!(transition_energy(&e, &vec![2, 1].into()).is_err());
    }

    #[test]
    fn cdf_and_tail_are_complementary() {
        for &s in &[0.0, 0.05, 0.25, 1.0, 3.0, 12.0] {
            for k in 0..8 {
                let cdf = poisson_cdf(s, k).unwrap();
                let tail = poisson_upper_tail(s, k + 1).unwrap();
                assert!(close(cdf + tail, 1.0, 1e-14), "s={s} k={k}");
            }
        }
        // Tiny tails keep their relative precision.
        let tail = poisson_upper_tail(0.01, 6).unwrap();
        let leading = fc_factor_1d(0.01, 6).unwrap();
        assert!(tail > leading && tail < leading * 1.01);
    }

    #[test]
    fn capped_weights_sum_to_one() {
        for k in 0..5 {
            let w = mode_weights(0.45, k, CutoffRule::Cap).unwrap();
            assert_eq!(w.len(), k as usize + 1);
            assert!(close(w.iter().sum::<f64>(), 1.0, 1e-15));
        }
        let t = mode_weights(0.25, 1, CutoffRule::Truncate).unwrap();
        assert!(close(t[0], libm::exp(-0.25), 1e-16));
        assert!(close(t[1], 0.25 * libm::exp(-0.25), 1e-16));
        let c = mode_weights(0.25, 1, CutoffRule::Cap).unwrap();
        assert!(close(c[1], 1.0 - libm::exp(-0.25), 1e-15));
    }
}
