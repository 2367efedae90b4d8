//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use statrs::distribution::{ChiSquared, ContinuousCDF, DiscreteCDF, Poisson};
use vibronic::molecule_file::load_molecule;
use vibronic::spectrum_csv::{parse_spectrum, write_spectrum};
use vibronic_core::broaden::{broaden, trapezoid, BroadeningKernel, EnergyGrid, Shape};
use vibronic_core::convergence::convergence_against;
use vibronic_core::fc::{fc_factor_1d, CutoffRule};
use vibronic_core::fidelity::FidelityNorm;
use vibronic_core::sampler::{sample_mode, sample_spectrum, DetectorModel, SamplerConfig};
use vibronic_core::sos::{build_reference, state_count, SosConfig};
use vibronic_core::spectrum::{LineSpectrum, Normalization, Stick};
use vibronic_core::{Molecule, Transition};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Lanczos (g = 7, n = 9) ln Γ(x), x > 0.5.
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let t = x + 7.5;
    let a = C[0] + (1..9).map(|i| C[i] / (x + i as f64)).sum::<f64>();
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

struct Lcg(u64);

impl Lcg {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        ((self.unit() * n as f64) as usize).min(n - 1)
    }
}

fn random_molecule(rng: &mut Lcg, name: String, max_modes: usize, max_s: f64) -> Molecule {
    let n = 1 + rng.below(max_modes);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| (150.0 + (rng.unit() * 2500.0).round(), 0.02 + rng.unit() * (max_s - 0.02)))
        .collect();
    Molecule::from_pairs(name, 20000.0, Transition::Absorption, &pairs)
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    let mut zero_ok = true;
    for &s in &[0.0, 0.05, 0.25, 0.5, 1.0, 3.0] {
        for j in 0..=10u32 {
            points += 1;
            let got = fc_factor_1d(s, j).unwrap();
            if s == 0.0 {
                zero_ok &= got == if j == 0 { 1.0 } else { 0.0 };
                continue;
            }
            let jf = f64::from(j);
            let want = (jf * s.ln() - s - ln_gamma(jf + 1.0)).exp();
            worst = worst.max((got - want).abs() / want);
        }
    }
    outcome(
        zero_ok && worst <= 1e-12,
        format!("fc_factor_1d vs independent log-gamma oracle, {points} points: max relative error {worst:.2e} (bound 1e-12)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg(0x5eed_0002);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let m = random_molecule(&mut rng, format!("c2-{i}"), 6, 1.0);
        for k in [1u32, 2, 3, 6] {
            let r = build_reference(&m, &SosConfig::new(k).with_normalization(Normalization::Raw)).unwrap();
            let want: f64 = m
                .modes
                .iter()
                .map(|mode| Poisson::new(mode.huang_rhys).unwrap().cdf(u64::from(k)))
                .product();
            worst = worst.max((r.captured - want).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-10 && secs < 1.0,
        format!("raw SOS total vs product of Poisson CDFs, 10 molecules x K in {{1,2,3,6}}: max abs error {worst:.2e} (bound 1e-10), {secs:.2} s"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg(0x5eed_0003);
    let events = 1_000_000u64;
    let mut worst_dev = 0.0f64;
    let mut worst_p = 1.0f64;
    for i in 0..20 {
        let m = random_molecule(&mut rng, format!("c3-{i}"), 3, 1.5);
        let k = 1 + rng.below(3) as u32;
        let exact = build_reference(
            &m,
            &SosConfig::new(k)
                .with_cutoff(CutoffRule::Cap)
                .with_normalization(Normalization::UnitL1),
        )
        .unwrap()
        .spectrum;
        let cfg = SamplerConfig::new(events, 3000 + i).with_max_quanta(k);
        let sampled = sample_spectrum(&m, &cfg, &DetectorModel::ideal()).unwrap();

        let mut chi2 = 0.0;
        let mut bins = 0u32;
        let (mut pool_e, mut pool_o) = (0.0, 0.0);
        for stick in &exact.sticks {
            let frac = sampled.fraction_at(stick.energy);
            worst_dev = worst_dev.max((frac - stick.intensity).abs());
            let expected = stick.intensity * events as f64;
            let observed = frac * events as f64;
            if expected < 5.0 {
                pool_e += expected;
                pool_o += observed;
            } else {
                chi2 += (observed - expected).powi(2) / expected;
                bins += 1;
            }
        }
        if pool_e > 0.0 {
            chi2 += (pool_o - pool_e).powi(2) / pool_e;
            bins += 1;
        }
        let unmatched: u64 = sampled
            .counts
            .iter()
            .filter(|(e, _)| exact.intensity_at(*e, 1e-6).is_none())
            .map(|c| c.1)
            .sum();
        if unmatched > 0 {
            return outcome(false, format!("{}: {unmatched} sampled events fall on no exact line", m.name));
        }
        if bins > 1 {
            worst_p = worst_p.min(ChiSquared::new(f64::from(bins - 1)).unwrap().sf(chi2));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_dev <= 5e-3 && worst_p > 1e-4 && secs < 30.0,
        format!("20 molecules (N<=3, K<=3), 1e6 events vs capped exact spectrum: max line deviation {worst_dev:.2e} (bound 5e-3), min chi-square p {worst_p:.3e} (bound 1e-4), {secs:.1} s"),
    )
}

fn mean_fidelity(m: &Molecule, k: u32, cutoff: CutoffRule, events: u64, seed: u64) -> (f64, f64) {
    let reference = build_reference(m, &SosConfig::new(k).with_cutoff(cutoff)).unwrap().spectrum;
    let base = SamplerConfig::new(1, seed).with_max_quanta(k);
    let r = convergence_against(m, &base, &DetectorModel::ideal(), &[events], 30, &reference, FidelityNorm::L2)
        .unwrap();
    (r.mean_fidelity[0], r.std_fidelity[0])
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let m = load_molecule(fixture("pentacene_8.json")).unwrap();
    let max_s = m.modes.iter().map(|x| x.huang_rhys).fold(0.0, f64::max);
    let (low, low_sd) = mean_fidelity(&m, 1, CutoffRule::Truncate, 10_000, 4);
    let (high, high_sd) = mean_fidelity(&m, 1, CutoffRule::Cap, 100_000_000, 4);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        m.mode_count() == 8 && max_s <= 0.25 && low > 0.99 && high >= 0.99999,
        format!("8 modes, K=1, 30 runs: F(1e4) = {low:.6} +/- {low_sd:.1e} (truncated reference, bound > 0.99); F(1e8) = {high:.8} +/- {high_sd:.1e} (capped reference, bound >= 0.99999); {secs:.0} s"),
    )
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (file, k) in [("naphthalene_9.json", 3), ("anthracene_12.json", 3), ("pentacene_18.json", 1)] {
        let m = load_molecule(fixture(file)).unwrap();
        let (f, sd) = mean_fidelity(&m, k, CutoffRule::Truncate, 100_000, 5);
        let max_s = m.modes.iter().map(|x| x.huang_rhys).fold(0.0, f64::max);
        pass &= f > 0.99;
        parts.push(format!("{} modes (K={k}, max S {max_s}) F = {f:.6} +/- {sd:.1e}", m.mode_count()));
    }
    outcome(pass, format!("30 runs at 1e5 events, bound > 0.99: {}", parts.join("; ")))
}

fn criterion_6() -> Outcome {
    let a = state_count(8, 1, u64::MAX).unwrap();
    let b = state_count(18, 1, u64::MAX).unwrap();
    outcome(a == 256 && b == 262_144, format!("state_count(8,1) = {a}, state_count(18,1) = {b}"))
}

fn cli(args: &[&str]) -> (bool, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vibronic"))
        .args(args)
        .env_remove("VIBRONIC_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.success(),
        out.stdout,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn criterion_7() -> Outcome {
    let m = fixture("anthracene_66.json");
    let modes = load_molecule(&m).unwrap().mode_count();
    let start = Instant::now();
    let (ok, stdout, stderr) = cli(&[
        "--seed", "7", "sample", m.to_str().unwrap(), "--events", "100000", "--prune-s", "0",
    ]);
    let secs = start.elapsed().as_secs_f64();
    let lines = parse_spectrum(&String::from_utf8_lossy(&stdout)).map(|s| s.len()).unwrap_or(0);
    outcome(
        ok && modes == 66 && lines > 0 && secs < 5.0,
        format!("vibronic sample, {modes} modes, unbounded K, 1e5 events: {secs:.3} s wall (bound 5 s), {lines} lines{}", if ok { String::new() } else { format!(", error: {stderr}") }),
    )
}

fn criterion_8() -> Outcome {
    let m = fixture("anthracene_12.json");
    let mut outputs = Vec::new();
    for threads in ["1", "2", "8"] {
        let (ok, stdout, stderr) = cli(&[
            "--seed", "2024", "sample", m.to_str().unwrap(), "--events", "300000",
            "--chunk-size", "20000", "--threads", threads,
        ]);
        if !ok {
            return outcome(false, format!("sample with {threads} threads failed: {stderr}"));
        }
        outputs.push(stdout);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!("sample output at 1, 2 and 8 threads ({} bytes each, 15 chunks): {}", outputs[0].len(), if same { "byte-identical" } else { "differs" }),
    )
}

fn criterion_9() -> Outcome {
    let events = 1_000_000u64;
    let d = DetectorModel {
        efficiency: 0.8,
        ..DetectorModel::ideal()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (lane, s) in [0.1, 0.25, 1.0].into_iter().enumerate() {
        let counts = sample_mode(s, lane, &SamplerConfig::new(events, 9), &d).unwrap();
        let mean = counts.iter().map(|&c| f64::from(c)).sum::<f64>() / events as f64;
        let target = 0.8 * s;
        let sigma = (target / events as f64).sqrt();
        let z = (mean - target) / sigma;
        pass &= z.abs() <= 3.0;
        parts.push(format!("S={s}: mean {mean:.5} vs {target:.3} (z = {z:+.2})"));
    }
    outcome(pass, format!("eta = 0.8, 1e6 events, bound |z| <= 3: {}", parts.join("; ")))
}

fn unit_stick(e: f64) -> LineSpectrum {
    LineSpectrum::from_sticks(vec![Stick::new(e, 1.0)], 1e-6)
}

fn criterion_10_peak() -> Outcome {
    let mut worst = 0.0f64;
    for fwhm in [1.0, 30.0, 100.0, 300.0] {
        let kernel = BroadeningKernel::new(Shape::Lorentzian, fwhm).unwrap();
        let grid = EnergyGrid::new(1000.0 - 20.0 * fwhm, 1000.0 + 20.0 * fwhm, fwhm / 20.0).unwrap();
        let out = broaden(&unit_stick(1000.0), &kernel, &grid);
        let peak = out.intensity_at(1000.0, 1e-6).unwrap();
        let want = 2.0 / (std::f64::consts::PI * fwhm);
        worst = worst.max((peak - want).abs() / want);
    }
    outcome(worst <= 1e-9, format!("unit-stick Lorentzian peak vs 2/(pi FWHM), FWHM in {{1,30,100,300}}: max relative error {worst:.2e} (bound 1e-9)"))
}

fn criterion_10_area(shape: Shape) -> Outcome {
    let m = load_molecule(fixture("pentacene_8.json")).unwrap();
    let sticks = build_reference(&m, &SosConfig::new(1)).unwrap().spectrum;
    let mut worst = 0.0f64;
    for fwhm in [30.0, 100.0] {
        let kernel = BroadeningKernel::new(shape, fwhm).unwrap();
        let lo = sticks.sticks.first().unwrap().energy - 20.0 * fwhm;
        let hi = sticks.sticks.last().unwrap().energy + 20.0 * fwhm;
        let grid = EnergyGrid::new(lo, hi, fwhm / 20.0).unwrap();
        let area = trapezoid(&broaden(&sticks, &kernel, &grid));
        worst = worst.max((area - sticks.total_intensity()).abs() / sticks.total_intensity());
    }
    let name = match shape {
        Shape::Lorentzian => "Lorentzian",
        Shape::Gaussian => "Gaussian",
    };
    outcome(
        worst < 1e-3,
        format!("{name} area on a grid spanning +/-20 FWHM vs stick total, FWHM in {{30,100}}: max relative deficit {worst:.3e} (bound 1e-3)"),
    )
}

fn criterion_10_csv() -> Outcome {
    let m = load_molecule(fixture("naphthalene_9.json")).unwrap();
    let reference = build_reference(&m, &SosConfig::new(3)).unwrap().spectrum;
    let sampled = sample_spectrum(&m, &SamplerConfig::new(50_000, 10), &DetectorModel::ideal())
        .unwrap()
        .normalize(Normalization::UnitL1)
        .unwrap();
    let kernel = BroadeningKernel::new(Shape::Lorentzian, 30.0).unwrap();
    let broadened = broaden(&reference, &kernel, &EnergyGrid::covering(&reference, &kernel).unwrap());
    let mut checked = 0;
    for spec in [&reference, &sampled, &broadened] {
        let text = write_spectrum(spec);
        let again = match parse_spectrum(&text) {
            Ok(s) => write_spectrum(&s),
            Err(e) => return outcome(false, format!("re-parse failed: {e}")),
        };
        if again != text {
            return outcome(false, "re-emitted CSV differs");
        }
        checked += 1;
    }
    outcome(true, format!("emit, parse, emit is byte-identical for {checked} spectra (exact, sampled, broadened)"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10a", criterion_10_peak),
        ("10b", || criterion_10_area(Shape::Gaussian)),
        ("10c", || criterion_10_area(Shape::Lorentzian)),
        ("10d", criterion_10_csv),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let o = run();
        println!("criterion {id:<4} {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
