//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use spinlab::estimation::{
    default_phase_grid, max_cfi_over_phase, moment_sensitivity, qfi_pure, uniform_grid,
};
use spinlab::protocols::{
    build_ghz_protocol, build_protocol, ghz_capable_axis, ghz_state, CompiledProtocol, Family,
    BasisChoice, FixedTimeScan, ProtocolKind, ProtocolSpec,
};
use spinlab::spin::{coherent_state, Axis, CollectiveOperator, Sign};
use spinlab::verify::{verify_theorem, CaseKind, TheoremConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_cfi(spec: &ProtocolSpec, sigma: f64) -> f64 {
    max_cfi_over_phase(spec, sigma, &default_phase_grid()).expect("phase scan").best_value
}

/// 200 random parity eigenstates with parity-flipping generators saturate
/// `4Var(G)`; broken conditions leave a strict gap.
fn theorem_saturation() -> Outcome {
    let cfg = TheoremConfig { seed: 20_240_611, cases: 200, falsification_cases: 100, max_n: 12, ..Default::default() };
    let report = verify_theorem(&cfg).map_err(|e| e.to_string())?;
    let dev = report.max_saturation_deviation();
    let s = report.strict_gap_share(CaseKind::BrokenState);
    let g = report.strict_gap_share(CaseKind::BrokenGenerator);
    check(
        dev <= 1e-8 && report.passed(),
        format!("max rel dev {dev:.2e} (<= 1e-8); strict-gap share: broken state {s:.2}, broken generator {g:.2} (>= 0.90)"),
    )
}

/// At zero noise, no readout, echo and pseudo-echo all reach the QFI.
fn readout_invariance() -> Outcome {
    let n = 100;
    let mut values = Vec::new();
    let mut fq = 0.0;
    for kind in [ProtocolKind::Trivial, ProtocolKind::Echo, ProtocolKind::PseudoEcho] {
        let spec = build_protocol(kind, n, 0.1, None).unwrap();
        fq = CompiledProtocol::new(&spec, 0.0).unwrap().qfi().unwrap();
        values.push(max_cfi(&spec, 0.0));
    }
    let worst = values.iter().map(|v| rel(*v, fq)).fold(0.0, f64::max);
    check(
        worst <= 1e-6,
        format!("F_Q = {fq:.6}, max_phi F_C = {values:.6?}, worst rel dev {worst:.2e} (<= 1e-6)"),
    )
}

/// Coherent-state QFI equals `N` and the moment method sits at the SNL.
fn coherent_baselines() -> Outcome {
    let n = 100;
    let css = coherent_state(n, Axis::X, Sign::Plus).unwrap();
    let fq = qfi_pure(&css, &CollectiveOperator::axis(n, Axis::Y).unwrap()).unwrap();
    let curve = moment_sensitivity(&ProtocolSpec::new(n), Axis::Z, &default_phase_grid(), 0.0).unwrap();
    let snl = n as f64 * curve.best_value;
    check(
        rel(fq, n as f64) <= 1e-10 && (snl - 1.0).abs() <= 1e-8,
        format!("F_Q(CSS) = {fq:.12} (N = {n}), min N*dphi^2 = {snl:.12}"),
    )
}

fn heisenberg_limit() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [2usize, 10, 100] {
        let fq = qfi_pure(&ghz_state(n).unwrap(), &CollectiveOperator::axis(n, Axis::Y).unwrap()).unwrap();
        let d = rel(fq, (n * n) as f64);
        ok &= d <= 1e-8;
        parts.push(format!("N={n}: F_Q/N^2-1 = {d:.1e}"));
    }
    check(ok, parts.join(", "))
}

/// The OAT family's QFI sits at `N²/2` over an intermediate window.
fn qfi_plateau() -> Outcome {
    let n = 100;
    let window = uniform_grid(0.2, 1.2, 21);
    let values: Vec<f64> = window
        .iter()
        .map(|&chi_t| {
            let spec = build_protocol(ProtocolKind::Trivial, n, chi_t, None).unwrap();
            CompiledProtocol::new(&spec, 0.0).unwrap().qfi().unwrap()
        })
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check(
        lo >= 4500.0 && hi <= 5500.0,
        format!("QFI over chi_t in [0.2, 1.2]: min {lo:.1}, max {hi:.1} (5000 +- 10%)"),
    )
}

/// Best moment sensitivity of the trivial protocol over `χt`.
fn best_pseudospin(n: usize) -> f64 {
    let grid = uniform_grid(-0.02, 0.02, 21);
    let eval = |log_chi: f64| -> f64 {
        let spec = build_protocol(ProtocolKind::Trivial, n, log_chi.exp(), None).unwrap();
        moment_sensitivity(&spec, Axis::Z, &grid, 0.0).unwrap().best_value
    };
    let centre = (n as f64).powf(-2.0 / 3.0);
    let coarse: Vec<f64> = uniform_grid((0.2 * centre).ln(), (5.0 * centre).ln(), 25);
    let vals: Vec<f64> = coarse.iter().map(|&x| eval(x)).collect();
    let i = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let (lo, hi) = (coarse[i.saturating_sub(1)], coarse[(i + 1).min(coarse.len() - 1)]);
    spinlab::estimation::search::golden_section_min(eval, lo, hi, 1e-4).1
}

fn pseudospin_scaling() -> Outcome {
    let ns = [64usize, 91, 128, 181, 256, 362, 512];
    let pts: Vec<(f64, f64)> = ns.iter().map(|&n| ((n as f64).ln(), best_pseudospin(n).ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    check((slope + 5.0 / 3.0).abs() <= 0.15, format!("log-log slope {slope:.4} (target -5/3 +- 0.15)"))
}

fn robustness_ordering() -> Outcome {
    let (n, chi, sigma) = (100, 0.1, 5.0);
    let trivial = max_cfi(&build_protocol(ProtocolKind::Trivial, n, chi, None).unwrap(), sigma);
    let echo = max_cfi(&build_protocol(ProtocolKind::Echo, n, chi, None).unwrap(), sigma);
    let (best_t2, best_asym) = uniform_grid(0.125, 0.5, 16)
        .into_iter()
        .map(|t2| (t2, max_cfi(&build_protocol(ProtocolKind::Asymmetric, n, chi, Some(t2)).unwrap(), sigma)))
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    check(
        echo >= 2.0 * trivial && best_asym >= echo,
        format!(
            "sigma = 5: no readout {trivial:.1}, echo {echo:.1} (ratio {:.1} >= 2), asymmetric best {best_asym:.1} at t2 = {best_t2}",
            echo / trivial
        ),
    )
}

/// Dense GHZ + echo interferometer at small `N` for cross-checking the noisy
/// CFI curve.
fn ghz_echo_oracle(n: usize, sigma: f64) -> common::DenseInterferometer {
    let (jx, jy, jz) = common::ladder(n);
    let (psi0, axis_op) = if n.is_multiple_of(2) {
        (common::expm_i(&jz, FRAC_PI_2) * common::css_x(n), jy.clone())
    } else {
        (common::css_x(n), jx.clone())
    };
    // squeezing rotation from a dense scan of Var(Jz); flat at π/2
    let twisted = common::expm_i(&(&jz * &jz), FRAC_PI_2) * &psi0;
    let thetas = uniform_grid(0.0, PI, 2001);
    let vars: Vec<f64> = thetas.iter().map(|&t| common::variance(&(common::expm_i(&axis_op, t) * &twisted), &jz)).collect();
    let (vmin, vmax) = vars.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
    let theta = if vmax - vmin < 1e-9 {
        0.0
    } else {
        thetas[(0..vars.len()).min_by(|&a, &b| vars[a].total_cmp(&vars[b])).unwrap()]
    };
    let u1 = common::squeeze(n, FRAC_PI_2, &axis_op, theta);
    common::DenseInterferometer {
        prepared: &u1 * psi0,
        generator: jy,
        readout: u1.adjoint(),
        basis: common::axis_basis(n, 'y'),
        noise: common::noise_matrix(n + 1, sigma),
    }
}

fn ghz_robustness() -> Outcome {
    // small-N cross-check of the noisy curve on a shared grid
    let n_small = 20;
    let grid = uniform_grid(-FRAC_PI_2, FRAC_PI_2, 181);
    let mut oracle_parts = Vec::new();
    let mut worst = 0.0f64;
    for sigma in [(n_small as f64).sqrt(), 2.0 * (n_small as f64).sqrt()] {
        let oracle = ghz_echo_oracle(n_small, sigma);
        let reference = grid.iter().map(|&p| oracle.cfi(p, 1e-5)).fold(f64::NEG_INFINITY, f64::max);
        let spec = build_ghz_protocol(ProtocolKind::Echo, n_small).unwrap();
        let lib = max_cfi_over_phase(&spec, sigma, &grid).unwrap().grid_best_value;
        worst = worst.max(rel(lib, reference));
        oracle_parts.push(format!("sigma={sigma:.3}: {:.4} N^2", reference / (n_small * n_small) as f64));
    }
    let n = 100;
    let hl = (n * n) as f64;
    let value = max_cfi(&build_ghz_protocol(ProtocolKind::Echo, n).unwrap(), 10.0);
    check(
        worst <= 1e-6 && value >= 0.5 * hl,
        format!(
            "N=20 oracle [{}] agrees to {worst:.1e}; N=100 sigma=10: {value:.1} = {:.3} N^2 (>= 0.5)",
            oracle_parts.join(", "),
            value / hl
        ),
    )
}

fn fixed_t_endpoints() -> Outcome {
    let n = 100;
    let mut parts = Vec::new();
    let mut ok = true;

    // zero noise, where the QFI grows monotonically over the budget
    for total in [0.01, 0.05, 0.1] {
        for family in Family::ALL {
            let r = FixedTimeScan::new(n, total, 0.0, family).run().unwrap();
            let good = (r.best_t1 - total).abs() <= 1e-12;
            ok &= good;
            if !good {
                parts.push(format!("sigma=0 T={total} {family}: t1={}", r.best_t1));
            }
        }
    }
    parts.push("sigma=0, T in {0.01,0.05,0.1}: t1 = T".into());

    for sigma in [1.0, 2.0] {
        for family in Family::ALL {
            let r = FixedTimeScan::new(n, 0.01, sigma, family).run().unwrap();
            let good = (r.best_t1 - 0.01).abs() <= 1e-12;
            ok &= good;
            if !good {
                parts.push(format!("T=0.01 sigma={sigma} {family}: t1={}", r.best_t1));
            }
        }
    }
    parts.push("T=0.01, sigma in {1,2}: t1 = T".into());

    // away from the even split the cat-making dynamics leave no parity basis
    let axis = ghz_capable_axis(n);
    let coarse = uniform_grid(0.0, PI, 33);
    for sigma in [1.0, 5.0, 10.0] {
        for family in Family::ALL {
            let r = FixedTimeScan::new(n, PI, sigma, family)
                .initial(axis)
                .basis(BasisChoice::Best)
                .t1_grid(coarse.clone())
                .run()
                .unwrap();
            let good = (r.best_t1 - FRAC_PI_2).abs() <= PI / 100.0;
            ok &= good;
            parts.push(format!("T=pi sigma={sigma} {family}: t1={:.4} F={:.0}", r.best_t1, r.best_max_cfi));
        }
    }
    check(ok, parts.join("; "))
}

fn hellinger_consistency() -> Outcome {
    let n = 100;
    let phi = 1e-3;
    let mut specs: Vec<(String, ProtocolSpec)> = vec![
        ("trivial".into(), build_protocol(ProtocolKind::Trivial, n, 0.1, None).unwrap()),
        ("echo".into(), build_protocol(ProtocolKind::Echo, n, 0.1, None).unwrap()),
        ("pseudo-echo".into(), build_protocol(ProtocolKind::PseudoEcho, n, 0.1, None).unwrap()),
        ("asymmetric".into(), build_protocol(ProtocolKind::Asymmetric, n, 0.1, Some(0.2)).unwrap()),
        ("pseudo-forward".into(), build_protocol(ProtocolKind::PseudoForward, n, 0.1, Some(0.2)).unwrap()),
        ("ghz-readout".into(), build_protocol(ProtocolKind::GhzReadout, n, 0.1, None).unwrap()),
    ];
    for kind in [ProtocolKind::Trivial, ProtocolKind::Echo] {
        specs.push((format!("ghz-{kind}"), build_ghz_protocol(kind, n).unwrap()));
    }
    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    for (name, spec) in &specs {
        let c = CompiledProtocol::new(spec, 0.0).unwrap();
        let fc = c.cfi(0.0).unwrap();
        let dh = c.hellinger_sq(0.0, phi).unwrap();
        let d = rel(8.0 * dh / (phi * phi), fc);
        if d > worst {
            worst = d;
            worst_name = name.clone();
        }
    }
    check(worst <= 0.01, format!("{} protocols, worst rel dev {worst:.2e} ({worst_name}) (<= 1e-2)", specs.len()))
}

fn histogram_contrast() -> Outcome {
    let n = 100;
    let dphi = 1.0 / (n as f64).sqrt();
    let sigma = (n as f64 / 4.0).sqrt();
    let d = |kind| {
        let c = CompiledProtocol::new(&build_ghz_protocol(kind, n).unwrap(), sigma).unwrap();
        c.hellinger_sq(0.0, dphi).unwrap()
    };
    let (plain, echo) = (d(ProtocolKind::Trivial), d(ProtocolKind::Echo));
    check(
        echo >= 10.0 * plain,
        format!("d_H^2 no echo {plain:.3e}, echo {echo:.3e}, ratio {:.1} (>= 10)", echo / plain),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("theorem saturation", theorem_saturation),
        ("readout invariance at sigma = 0", readout_invariance),
        ("coherent-state baselines", coherent_baselines),
        ("Heisenberg limit", heisenberg_limit),
        ("QFI plateau", qfi_plateau),
        ("pseudospin scaling", pseudospin_scaling),
        ("robustness ordering", robustness_ordering),
        ("GHZ robustness", ghz_robustness),
        ("fixed-T endpoints", fixed_t_endpoints),
        ("Hellinger consistency", hellinger_consistency),
        ("histogram contrast", histogram_contrast),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
