//! Subcommand implementations. Each returns its report text or output paths;
//! `main` maps errors to exit codes.

use crate::config::{Resolved, SimConfig};
use crate::output::{energy_csv, fmt_num, sweep_csv, trajectory_csv};
use crate::CliError;
use fishbone::cable::CableGeometry;
use fishbone::diagnostics::{
    annotate, energies, energy_identity_residual, lemma_suite, random_state, sample_rng, LemmaReport,
};
use fishbone::dynamics::{Model, ModelParams};
use fishbone::experiments::{tnb_preset, wind_sweep, Scenario, SweepRow};
use fishbone::integrate::{integrate, IntegratorConfig};
use fishbone::linear::{closed_form, decay_rate, spectrum};
use fishbone::spectral::{make_grid, Basis};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub fn load(path: &Path) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    SimConfig::parse(&text)
}

fn out_dir(cfg: &SimConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&cfg.directory))
}

/// Files written by `simulate`.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub trajectory: PathBuf,
    pub energy: PathBuf,
    pub manifest: PathBuf,
    pub samples: usize,
    pub max_residual: f64,
}

pub fn simulate(cfg: &SimConfig, out: Option<&Path>) -> Result<Bundle, CliError> {
    let resolved = cfg.resolve()?;
    let mut model = resolved.model()?;
    let mut traj = integrate(&resolved.initial, &mut model, &resolved.integrator).map_err(CliError::numeric)?;
    annotate(&mut traj, &model).map_err(CliError::numeric)?;
    let residual = if traj.len() >= 3 {
        energy_identity_residual(&traj, &model)
            .map_err(CliError::numeric)?
            .residual
    } else {
        vec![0.0; traj.len()]
    };
    let dir = out_dir(cfg, out);
    fs::create_dir_all(&dir)?;
    let channels = resolved.config.selected_channels();
    let d = &traj.diagnostics;
    let pick = |f: fn(&fishbone::diagnostics::EnergyBreakdown) -> f64| d.iter().map(f).collect::<Vec<_>>();
    let bundle = Bundle {
        trajectory: dir.join("trajectory.csv"),
        energy: dir.join("energy.csv"),
        manifest: dir.join("manifest.cfg"),
        samples: traj.len(),
        max_residual: residual.iter().fold(0.0f64, |m, r| m.max(r.abs())),
    };
    fs::write(&bundle.trajectory, trajectory_csv(&traj.times, &traj.states, &channels))?;
    fs::write(
        &bundle.energy,
        energy_csv(
            &traj.times,
            &pick(|e| e.e),
            &pick(|e| e.e_plus),
            &pick(|e| e.e_full),
            &residual,
        ),
    )?;
    let mut manifest_cfg = resolved.config.clone();
    manifest_cfg.directory = dir.display().to_string();
    fs::write(&bundle.manifest, manifest(&manifest_cfg, &channels))?;
    Ok(bundle)
}

fn manifest(cfg: &SimConfig, channels: &[String]) -> String {
    format!(
        "# fishbone {} run manifest\n# trajectory columns: t,{}\n# energy columns: t,E,Eplus,Efull,residual\n{}",
        env!("CARGO_PKG_VERSION"),
        channels.join(","),
        cfg.manifest()
    )
}

/// Per-mode spectrum and closed-form coefficients. Requires a linear config
/// (inactive cable, `S = P = 0`) unless `linearize` drops those terms.
pub fn linear(cfg: &SimConfig, linearize: bool, out: Option<&Path>, report: &mut String) -> Result<(), CliError> {
    let linearize = linearize || cfg.linearize;
    let resolved = cfg.resolve()?;
    let p = resolved.params;
    let nonlinear = !resolved.geometry.is_inactive() || p.stretching != 0.0 || p.prestress != 0.0;
    if nonlinear && !linearize {
        return Err(CliError::Config(
            "linear analysis needs cable.active = false and model.S = model.P = 0; pass --linearize to drop them"
                .into(),
        ));
    }
    let params = ModelParams {
        stretching: 0.0,
        prestress: 0.0,
        ..p
    };
    let spec = spectrum(&params, resolved.basis.n_max());
    for m in &spec.modes {
        let roots: Vec<String> = m
            .roots
            .iter()
            .map(|r| format!("{}{:+e}i", fmt_num(r.re), r.im))
            .collect();
        let _ = writeln!(report, "mode.{}.roots: {}", m.j, roots.join(" "));
        let _ = writeln!(report, "mode.{}.max_real: {}", m.j, fmt_num(m.max_real));
        let _ = writeln!(report, "mode.{}.class: {}", m.j, m.classification.as_str());
    }
    let rate = decay_rate(&params);
    let _ = writeln!(report, "abscissa: {}", fmt_num(spec.abscissa));
    let _ = writeln!(report, "decay_rate: {}", fmt_num(rate.rate));
    let _ = writeln!(report, "classification: {}", spec.classification.as_str());
    let sol = closed_form(&resolved.initial, &params, &resolved.basis).map_err(CliError::numeric)?;
    for m in &sol.modes {
        for (k, v) in [
            ("omega", m.omega),
            ("gamma", m.gamma),
            ("A", m.a),
            ("B", m.b),
            ("c1", m.c1),
            ("c2", m.c2),
        ] {
            let _ = writeln!(report, "mode.{}.{k}: {}", m.j, fmt_num(v));
        }
    }
    if cfg.linear_csv {
        let dir = out_dir(cfg, out);
        fs::create_dir_all(&dir)?;
        let (n, h) = fishbone::integrate::rk4_steps(cfg.every, cfg.t_end);
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let states: Vec<_> = times.iter().map(|t| sol.eval(*t)).collect();
        let path = dir.join("closed_form.csv");
        fs::write(
            &path,
            trajectory_csv(&times, &states, &resolved.config.selected_channels()),
        )?;
        let _ = writeln!(report, "csv: {}", path.display());
    }
    Ok(())
}

/// Wind sweep over `sweep.beta x sweep.U`; writes `sweep.csv`.
pub fn sweep(cfg: &SimConfig, out: Option<&Path>) -> Result<(Vec<SweepRow>, PathBuf), CliError> {
    let r: Resolved = cfg.resolve()?;
    let base = Scenario {
        name: r.config.name.clone(),
        params: r.params,
        geometry: r.geometry.clone(),
        basis: r.basis,
        grid: r.grid.clone(),
        initial: r.initial.clone(),
        integrator: r.integrator,
        outputs: r.config.selected_channels(),
    };
    let rows = wind_sweep(&cfg.sweep_beta, &cfg.sweep_wind, &base, &cfg.thresholds).map_err(CliError::from_param)?;
    let dir = out_dir(cfg, out);
    fs::create_dir_all(&dir)?;
    let path = dir.join("sweep.csv");
    fs::write(&path, sweep_csv(&rows))?;
    Ok((rows, path))
}

/// Outcome of `verify`: a `key: value` report and the violation count.
#[derive(Debug, Clone)]
pub struct Verification {
    pub report: String,
    pub violations: usize,
    /// `check: worst slack` for each failing check.
    pub failures: Vec<String>,
}

const DRIFT_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-5;

fn lemma_block(prefix: &str, rep: &LemmaReport, out: &mut String, failures: &mut Vec<String>) {
    for line in rep.to_text().lines() {
        let _ = writeln!(out, "{prefix}.{line}");
    }
    for c in &rep.checks {
        if c.violations > 0 {
            failures.push(format!(
                "{prefix}.{}: {} violations, worst slack {:.6e}",
                c.name, c.violations, c.worst_slack
            ));
        }
    }
    if rep.interpolation_constant > rep.interpolation_bound * (1.0 + 1e-12) {
        failures.push(format!(
            "{prefix}.interpolation: constant {:.6e} above {:.6e}",
            rep.interpolation_constant, rep.interpolation_bound
        ));
    }
}

/// Lemma suites on a nondimensional and the TNB cable, an energy
/// conservation run and a closed-form oracle run. `samples = 0` skips all.
pub fn verify(seed: u64, samples: usize, radius: f64) -> Result<Verification, CliError> {
    let mut report = String::new();
    let mut failures = Vec::new();
    let _ = writeln!(report, "seed: {seed}");
    let _ = writeln!(report, "samples: {samples}");
    if samples == 0 {
        let _ = writeln!(report, "violations: 0");
        return Ok(Verification {
            report,
            violations: 0,
            failures,
        });
    }
    let basis = Basis::nondimensional(8, 8).map_err(CliError::numeric)?;
    let grid = make_grid(&basis);
    let geom = CableGeometry::new(0.4, 1.0, 3.0, 2.0, &grid).map_err(CliError::numeric)?;
    let nd = lemma_suite(samples, radius, &geom, &basis, &grid, seed).map_err(CliError::numeric)?;
    lemma_block("lemma.unit", &nd, &mut report, &mut failures);
    let tnb = tnb_preset();
    let rep = lemma_suite(samples, radius, &tnb.geometry, &tnb.basis, &tnb.grid, seed).map_err(CliError::numeric)?;
    lemma_block("lemma.tnb", &rep, &mut report, &mut failures);

    // Conservative run with every nonlinearity active.
    let params = ModelParams {
        ell: 1.2,
        eps: 0.5,
        kappa: 0.3,
        stretching: 1.0,
        prestress: 0.5,
        upsilon: 1.2,
        ..ModelParams::default()
    };
    let b6 = Basis::nondimensional(6, 4).map_err(CliError::numeric)?;
    let g6 = make_grid(&b6);
    let geom6 = CableGeometry::new(0.4, 1.0, 3.0, 2.0, &g6).map_err(CliError::numeric)?;
    let model = Model::new(params, geom6, b6, g6).map_err(CliError::numeric)?;
    let y0 = random_state(&mut sample_rng(seed, u64::MAX), &b6, 1.0);
    let mut m = model.clone();
    let traj =
        integrate(&y0, &mut m, &IntegratorConfig::rk4(1e-3, 2.0).with_sampling(0.01)).map_err(CliError::numeric)?;
    let e: Vec<f64> = traj
        .states
        .iter()
        .map(|s| energies(s, &model).map(|e| e.e_full))
        .collect::<Result<_, _>>()
        .map_err(CliError::numeric)?;
    let drift = e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / e[0].abs().max(1.0);
    let _ = writeln!(report, "conservation.drift: {drift:.6e}");
    let _ = writeln!(report, "conservation.tolerance: {DRIFT_TOL:e}");
    if !(drift <= DRIFT_TOL) {
        failures.push(format!("conservation: relative drift {drift:.6e} above {DRIFT_TOL:e}"));
    }

    // Linear oracle.
    let lin = ModelParams {
        delta: 0.2,
        zeta: 0.3,
        beta: 0.05,
        wind_speed: 1.0,
        gravity: 0.5,
        stretching: 0.0,
        prestress: 0.0,
        ..params
    };
    let b3 = Basis::nondimensional(3, 3).map_err(CliError::numeric)?;
    let g3 = make_grid(&b3);
    let mut lm = Model::new(lin, CableGeometry::inactive(&g3), b3, g3).map_err(CliError::numeric)?;
    let y0 = random_state(&mut sample_rng(seed, u64::MAX - 1), &b3, 1.0);
    let sol = closed_form(&y0, &lin, &b3).map_err(CliError::numeric)?;
    let traj =
        integrate(&y0, &mut lm, &IntegratorConfig::rk4(2.5e-4, 5.0).with_sampling(0.05)).map_err(CliError::numeric)?;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = sol.eval(*t).to_vec();
        for (a, b) in exact.iter().zip(s.to_vec()) {
            err = err.max((a - b).abs());
            scale = scale.max(a.abs());
        }
    }
    let rel = err / scale;
    let _ = writeln!(report, "oracle.max_relative: {rel:.6e}");
    let _ = writeln!(report, "oracle.tolerance: {ORACLE_TOL:e}");
    if !(rel <= ORACLE_TOL) {
        failures.push(format!("oracle: relative error {rel:.6e} above {ORACLE_TOL:e}"));
    }
    let violations =
        nd.violations() + rep.violations() + usize::from(!(drift <= DRIFT_TOL)) + usize::from(!(rel <= ORACLE_TOL));
    let _ = writeln!(report, "violations: {violations}");
    Ok(Verification {
        report,
        violations,
        failures,
    })
}
