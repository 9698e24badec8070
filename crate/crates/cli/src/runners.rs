//! One runner per subcommand. Each reads its keys from the config, checks
//! that nothing else was set, and returns a table ordered by grid position.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use spinlab::estimation::{default_phase_grid, max_cfi_over_phase, moment_sensitivity};
use spinlab::protocols::{
    build_ghz_protocol, build_protocol, ghz_capable_axis, ghz_state, BasisChoice, CompiledProtocol, Family,
    FixedTimeScan, ProtocolKind, ProtocolSpec,
};
use spinlab::spin::{measurement_distribution, Axis, BasisSpec};
use spinlab::verify::{verify_theorem, CaseKind, TheoremConfig};

use crate::config::{parse_protocol, Config, ConfigError, ProtocolChoice};
use crate::table::{round_sig, Cell, ResultTable};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Library(spinlab::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<spinlab::Error> for RunError {
    fn from(e: spinlab::Error) -> Self {
        RunError::Library(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Library(e) => write!(f, "invalid parameters: {e}"),
        }
    }
}

/// A finished table, plus a failure report when the run checks a claim.
pub struct Outcome {
    pub table: ResultTable,
    pub failure: Option<String>,
}

impl From<ResultTable> for Outcome {
    fn from(table: ResultTable) -> Self {
        Self { table, failure: None }
    }
}

type Run = Result<Outcome, RunError>;

fn particles(cfg: &Config) -> Result<usize, ConfigError> {
    let n = cfg.usize_or("system.n", 100)?;
    if n < 2 {
        return Err(cfg.error_at("system.n", format!("need at least 2 particles, got {n}")));
    }
    Ok(n)
}

fn phase_grid(cfg: &Config) -> Result<Vec<f64>, ConfigError> {
    cfg.grid_or("scan.phi", default_phase_grid)
}

fn nonnegative(cfg: &Config, key: &str, grid: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    match grid.iter().find(|x| **x < 0.0) {
        Some(x) => Err(cfg.error_at(key, format!("values must be >= 0, got {x}"))),
        None => Ok(grid),
    }
}

fn protocols(cfg: &Config, default: &[&str]) -> Result<Vec<ProtocolChoice>, ConfigError> {
    let defaults: Vec<ProtocolChoice> = default.iter().map(|s| parse_protocol(s).unwrap()).collect();
    cfg.list_or("protocols", &defaults, parse_protocol)
}

/// Signal component for the moment method; `None` picks the better of the
/// two transverse components `Jy`, `Jz` at each point.
fn signal(cfg: &Config) -> Result<Option<Axis>, ConfigError> {
    match cfg.string_or("signal", "auto")?.as_str() {
        "auto" => Ok(None),
        s => s.parse::<Axis>().map(Some).map_err(|e| cfg.error_at("signal", e.to_string())),
    }
}

fn signal_name(signal: Option<Axis>) -> &'static str {
    signal.map_or("auto (best of y, z)", Axis::name)
}

/// `min_φ Δφ²` of the moment method.
fn moment(spec: &ProtocolSpec, signal: Option<Axis>, grid: &[f64], sigma: f64) -> spinlab::Result<f64> {
    let axes = match signal {
        Some(a) => vec![a],
        None => vec![Axis::Z, Axis::Y],
    };
    let mut best = f64::INFINITY;
    for a in axes {
        best = best.min(moment_sensitivity(spec, a, grid, sigma)?.best_value);
    }
    Ok(best)
}

/// Stock or cat-state protocol with the best available measurement basis.
fn spec_for(p: ProtocolChoice, n: usize, chi_t: f64, chi_t2: Option<f64>) -> spinlab::Result<ProtocolSpec> {
    let spec = if p.ghz { build_ghz_protocol(p.kind, n)? } else { build_protocol(p.kind, n, chi_t, chi_t2)? };
    Ok(ProtocolSpec { measurement_basis: BasisChoice::Best, ..spec })
}

fn qfi_of(spec: &ProtocolSpec) -> spinlab::Result<f64> {
    CompiledProtocol::with_basis(spec, BasisSpec::axis(spec.n_particles, Axis::Z)?, 0.0)?.qfi()
}

fn names(ps: &[ProtocolChoice]) -> Vec<String> {
    ps.iter().map(ProtocolChoice::name).collect()
}

/// `N Δφ²` from the moment method, `N / max F_C` per protocol and the
/// bound `N / F_Q`, one row per twisting strength, at zero noise.
pub fn sensitivity_vs_chit(cfg: &Config) -> Run {
    let n = particles(cfg)?;
    let chis = nonnegative(cfg, "scan.chi_t", cfg.grid_or("scan.chi_t", || (1..=100).map(|i| 0.003 * i as f64).collect())?)?;
    let signal = signal(cfg)?;
    let grid = phase_grid(cfg)?;
    let ps = protocols(cfg, &["trivial", "echo", "pseudo-echo"])?;
    let chi_t2 = cfg.opt_f64("protocol.chi_t2")?;
    cfg.finish()?;

    let mut columns = vec!["chi_t".to_string(), "moment_trivial".into(), "moment_echo".into()];
    columns.extend(names(&ps).into_iter().map(|p| format!("inv_cfi_{p}")));
    columns.push("qcrb".into());
    let nf = n as f64;
    let rows = chis
        .par_iter()
        .map(|&chi| -> spinlab::Result<Vec<f64>> {
            let mut row = vec![chi];
            for kind in [ProtocolKind::Trivial, ProtocolKind::Echo] {
                let spec = build_protocol(kind, n, chi, None)?;
                row.push(nf * moment(&spec, signal, &grid, 0.0)?);
            }
            for &p in &ps {
                row.push(nf / max_cfi_over_phase(&spec_for(p, n, chi, chi_t2)?, 0.0, &grid)?.best_value);
            }
            row.push(nf / qfi_of(&build_protocol(ProtocolKind::Trivial, n, chi, None)?)?);
            Ok(row)
        })
        .collect::<spinlab::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(columns);
    rows.into_iter().for_each(|r| table.push_f64(r));
    table.meta("signal", signal_name(signal));
    table.meta("units", "all sensitivity columns are N * dphi^2; 1 is the shot-noise limit");
    Ok(table.into())
}

/// Moment-method and Fisher sensitivities against detection noise at a
/// fixed twisting strength.
pub fn sensitivity_vs_sigma(cfg: &Config) -> Run {
    let n = particles(cfg)?;
    let chi = cfg.f64_or("protocol.chi_t", 0.1)?;
    let chi_t2 = cfg.opt_f64("protocol.chi_t2")?;
    let sigmas = nonnegative(cfg, "scan.sigma", cfg.grid_or("scan.sigma", || (0..=20).map(|i| 0.5 * i as f64).collect())?)?;
    let signal = signal(cfg)?;
    let grid = phase_grid(cfg)?;
    let ps = protocols(cfg, &["trivial", "echo"])?;
    cfg.finish()?;

    let mut columns = vec!["sigma".to_string()];
    for p in names(&ps) {
        columns.push(format!("moment_{p}"));
        columns.push(format!("inv_cfi_{p}"));
    }
    let specs = ps.iter().map(|&p| spec_for(p, n, chi, chi_t2)).collect::<spinlab::Result<Vec<_>>>()?;
    let nf = n as f64;
    let rows = sigmas
        .par_iter()
        .map(|&sigma| -> spinlab::Result<Vec<f64>> {
            let mut row = vec![sigma];
            for spec in &specs {
                row.push(nf * moment(spec, signal, &grid, sigma)?);
                row.push(nf / max_cfi_over_phase(spec, sigma, &grid)?.best_value);
            }
            Ok(row)
        })
        .collect::<spinlab::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(columns);
    rows.into_iter().for_each(|r| table.push_f64(r));
    table.meta("chi_t", chi);
    table.meta("signal", signal_name(signal));
    table.meta("units", "N * dphi^2; 1 is the shot-noise limit");
    Ok(table.into())
}

/// `max_φ F_C` and its phase per protocol against detection noise, flagging
/// values below the shot-noise limit `N`.
pub fn maxcfi_vs_sigma(cfg: &Config) -> Run {
    let n = particles(cfg)?;
    let chi = cfg.f64_or("protocol.chi_t", 0.1)?;
    let chi_t2 = cfg.opt_f64("protocol.chi_t2")?;
    let sigmas = nonnegative(cfg, "scan.sigma", cfg.grid_or("scan.sigma", || (0..=20).map(f64::from).collect())?)?;
    let grid = phase_grid(cfg)?;
    let ps = protocols(cfg, &["trivial", "echo", "pseudo-echo"])?;
    cfg.finish()?;

    let mut columns = vec!["sigma".to_string()];
    for p in names(&ps) {
        columns.extend([format!("cfi_{p}"), format!("phase_{p}"), format!("below_snl_{p}")]);
    }
    let specs = ps.iter().map(|&p| spec_for(p, n, chi, chi_t2)).collect::<spinlab::Result<Vec<_>>>()?;
    let mut qfi = Map::new();
    for (p, spec) in ps.iter().zip(&specs) {
        qfi.insert(p.name(), json!(round_sig(qfi_of(spec)?)));
    }
    let nf = n as f64;
    let rows = sigmas
        .par_iter()
        .map(|&sigma| -> spinlab::Result<Vec<f64>> {
            let mut row = vec![sigma];
            for spec in &specs {
                let curve = max_cfi_over_phase(spec, sigma, &grid)?;
                row.extend([curve.best_value, curve.best_phase, f64::from(u8::from(curve.best_value < nf))]);
            }
            Ok(row)
        })
        .collect::<spinlab::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(columns);
    rows.into_iter().for_each(|r| table.push_f64(r));
    table.meta("chi_t", chi);
    table.meta("qfi", Value::Object(qfi));
    Ok(table.into())
}

/// Clean and noisy outcome distributions of the cat state at `φ = 0` and
/// `φ = δφ`, in long format, with Hellinger distances in the metadata.
pub fn histograms(cfg: &Config) -> Run {
    let n = particles(cfg)?;
    let nf = n as f64;
    let dphi = cfg.f64_or("histogram.dphi", 1.0 / nf.sqrt())?;
    let sigma = cfg.f64_or("histogram.sigma", (nf / 4.0).sqrt())?;
    if sigma < 0.0 {
        return Err(cfg.error_at("histogram.sigma", "must be >= 0").into());
    }
    let ps = protocols(cfg, &["trivial", "echo"])?;
    if let Some(p) = ps.iter().find(|p| !matches!(p.kind, ProtocolKind::Trivial | ProtocolKind::Echo)) {
        return Err(cfg.error_at("protocols", format!("histograms take trivial and echo only, got `{}`", p.kind)).into());
    }
    cfg.finish()?;

    let mut table =
        ResultTable::new(["protocol", "phi", "m", "p", "p_noisy"].iter().map(|s| s.to_string()).collect());
    let mut distances = Map::new();
    let mut bases = Map::new();
    for (code, p) in ps.iter().enumerate() {
        let spec = build_ghz_protocol(p.kind, n)?;
        let compiled = CompiledProtocol::new(&spec, sigma)?;
        let at = |phi| -> spinlab::Result<_> {
            Ok((compiled.readout().clean_distribution(phi)?, compiled.readout().distribution(phi)?))
        };
        let (c0, n0) = at(0.0)?;
        let (c1, n1) = at(dphi)?;
        for (phi, clean, noisy) in [(0.0, &c0, &n0), (dphi, &c1, &n1)] {
            for ((m, pc), pn) in clean.outcomes().iter().zip(clean.probabilities()).zip(noisy.probabilities()) {
                table.push_f64(vec![code as f64, phi, *m, *pc, *pn]);
            }
        }
        let d = |a, b| spinlab::estimation::hellinger_sq(a, b).map(round_sig);
        distances.insert(p.kind.name().into(), json!({ "clean": d(&c0, &c1)?, "noisy": d(&n0, &n1)? }));
        bases.insert(p.kind.name().into(), json!(compiled.basis().label()));
    }
    table.meta("protocols", names(&ps).into_iter().map(|s| s.trim_start_matches("ghz-").to_string()).collect::<Vec<_>>());
    table.meta("state", "ghz");
    table.meta("dphi", round_sig(dphi));
    table.meta("sigma", round_sig(sigma));
    table.meta("basis", Value::Object(bases));
    table.meta("hellinger_sq", Value::Object(distances));
    // the cat state itself, for reference: weight on the two extreme outcomes
    let cat = measurement_distribution(&ghz_state(n)?, &BasisSpec::axis(n, Axis::Y)?)?;
    let poles = cat.probabilities()[0] + cat.probabilities()[n];
    table.meta("ghz_pole_weight", round_sig(poles));
    Ok(table.into())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

/// Best split of a fixed twisting budget per (total, noise, family).
pub fn fixed_t(cfg: &Config) -> Run {
    let n = particles(cfg)?;
    let totals = cfg.grid_or("scan.total", || vec![0.01, 0.1, std::f64::consts::PI])?;
    if let Some(t) = totals.iter().find(|t| **t <= 0.0) {
        return Err(cfg.error_at("scan.total", format!("budgets must be positive, got {t}")).into());
    }
    let sigmas = nonnegative(cfg, "scan.sigma", cfg.grid_or("scan.sigma", || vec![0.0, 2.0, 10.0])?)?;
    let families = cfg.list_or("fixed_t.families", &Family::ALL, parse_family)?;
    let points = cfg.usize_or("fixed_t.t1_points", 101)?;
    if points < 2 {
        return Err(cfg.error_at("fixed_t.t1_points", "need at least 2 points").into());
    }
    let initial = match cfg.string_or("fixed_t.initial", "x")?.as_str() {
        "ghz" => ghz_capable_axis(n),
        other => other.parse::<Axis>().map_err(|e| cfg.error_at("fixed_t.initial", e.to_string()))?,
    };
    let grid = phase_grid(cfg)?;
    cfg.finish()?;

    let columns = ["total", "sigma", "family", "best_t1", "best_max_cfi", "no_readout_cfi", "even_split_cfi"];
    let mut table = ResultTable::new(columns.iter().map(|s| s.to_string()).collect());
    for &total in &totals {
        let t1_grid: Vec<f64> = (0..points).map(|i| total * i as f64 / (points - 1) as f64).collect();
        for &sigma in &sigmas {
            for (code, &family) in families.iter().enumerate() {
                let r = FixedTimeScan::new(n, total, sigma, family)
                    .initial(initial)
                    .basis(BasisChoice::Best)
                    .t1_grid(t1_grid.clone())
                    .phase_grid(grid.clone())
                    .run()?;
                table.push_f64(vec![
                    total,
                    sigma,
                    code as f64,
                    r.best_t1,
                    r.best_max_cfi,
                    r.no_readout(),
                    r.even_split(),
                ]);
            }
        }
    }
    table.meta("families", families.iter().map(|f| f.name()).collect::<Vec<_>>());
    table.meta("initial_axis", initial.name());
    Ok(table.into())
}

/// Randomized check that parity measurements saturate `4 Var(G)`; fails
/// with the offending seeds on any violation.
pub fn verify(cfg: &Config, seed: Option<u64>) -> Run {
    let defaults = TheoremConfig::default();
    let config_seed = cfg.u64_opt("verify.seed")?;
    let theorem = TheoremConfig {
        seed: seed.or(config_seed).unwrap_or(defaults.seed),
        cases: cfg.usize_or("verify.cases", defaults.cases)?,
        falsification_cases: cfg.usize_or("verify.falsification_cases", defaults.falsification_cases)?,
        min_n: cfg.usize_or("verify.min_n", defaults.min_n)?,
        max_n: cfg.usize_or("verify.max_n", defaults.max_n)?,
        saturation_tol: cfg.f64_or("verify.saturation_tol", defaults.saturation_tol)?,
        min_gap_share: cfg.f64_or("verify.min_gap_share", defaults.min_gap_share)?,
    };
    if theorem.min_n == 0 || theorem.min_n > theorem.max_n {
        return Err(cfg.error_at("verify.min_n", "need 1 <= verify.min_n <= verify.max_n").into());
    }
    cfg.finish()?;

    let report = verify_theorem(&theorem)?;
    let columns = ["kind", "seed", "n", "cfi", "four_var", "relative_gap"];
    let mut table = ResultTable::new(columns.iter().map(|s| s.to_string()).collect());
    for c in &report.cases {
        table.push(vec![
            Cell::Int(c.kind.code().into()),
            Cell::Int(c.seed),
            Cell::Int(c.n as u64),
            c.cfi.into(),
            c.four_var.into(),
            c.relative_gap.into(),
        ]);
    }
    let violations: Vec<Value> = report
        .violations()
        .iter()
        .map(|c| json!({ "kind": c.kind.name(), "seed": c.seed, "n": c.n, "relative_gap": round_sig(c.relative_gap) }))
        .collect();
    table.meta("kinds", CaseKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>());
    table.meta("seed", theorem.seed);
    table.meta(
        "summary",
        json!({
            "max_saturation_deviation": round_sig(report.max_saturation_deviation()),
            "strict_gap_share_broken_state": round_sig(report.strict_gap_share(CaseKind::BrokenState)),
            "strict_gap_share_broken_generator": round_sig(report.strict_gap_share(CaseKind::BrokenGenerator)),
            "passed": report.passed(),
            "violations": violations,
        }),
    );
    let failure = (!report.passed()).then(|| {
        let mut msg = String::from("theorem verification failed");
        for c in report.violations() {
            msg.push_str(&format!(
                "\n  {} case N = {} (seed {}): relative gap {:e}",
                c.kind, c.n, c.seed, c.relative_gap
            ));
        }
        for kind in [CaseKind::BrokenState, CaseKind::BrokenGenerator] {
            let share = report.strict_gap_share(kind);
            if share < theorem.min_gap_share {
                msg.push_str(&format!("\n  {kind}: strict-gap share {share:.3} below threshold"));
            }
        }
        msg
    });
    Ok(Outcome { table, failure })
}
