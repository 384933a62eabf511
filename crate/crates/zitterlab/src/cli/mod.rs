//! Command-line front end.
//!
//! ```text
//! zitterlab check    --config <path> [--out <dir>] [--seed N]
//! zitterlab simulate --config <path> [--out <dir>] [--svg]
//! zitterlab sweep    --config <path> [--out <dir>]
//! ```
//!
//! Exit codes are a stable contract: 0 = success, 1 = numerical or
//! tolerance failure (a residual above tolerance, a rejected step, a
//! missing helical solution), 2 = usage or configuration error.  Identical
//! config and seed produce byte-identical output files.

mod config;
mod output;

pub use config::{parse_config, HelixSpec, InitialData, Mode, RunConfig};

use std::path::{Path, PathBuf};

use crate::dual::JetScalar;
use crate::dynamics::{
    helix, integrate, make_initial_state, reduced_rhs_tol, riewe_form_check, Trajectory,
};
use crate::error::Error;
use crate::hamiltonian::{
    contact_h, direct_form_residual, h_on_legendre_residual, lift_relation_residual, ContactState,
};
use crate::jetcalc::{
    correspondence_residual, project_contact, sample_future_timelike_jet, sample_timelike_jet,
    ContactFunction, ContactJetOf,
};
use crate::lagrangians::{bopp_lagrangian, contact_density, zermelo_residuals, BoppLagrangian};
use crate::legendre::{
    contact_momenta, elimination_identities, momenta_ad, momenta_explicit,
    zermelo_momentum_residuals, CanonicalState,
};
use crate::minkowski::{dot3, dot4, FourVector, ThreeVector};
use crate::rng::XorShift64Star;
use output::{
    ensure_dir, monitors_csv, report_csv, report_txt, summary_csv, svg_plot, trajectory_csv,
    write_text, Suite, SweepRow,
};

const USAGE: &str =
    "usage: zitterlab <check|simulate|sweep> --config <path> [--svg] [--out <dir>] [--seed N]";

/// Gauge tolerance handed to the reduced right side during integration.
/// Runge-Kutta stages leave the u² = 1 surface by O(step²) even on exact
/// solutions, so the in-flight guard is looser than the per-sample
/// monitors, which are the real conservation record.
const STAGE_GAUGE_TOLERANCE: f64 = 1e-4;

/// A terminal failure: exit code plus a message for stderr.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: format!("{}\n{USAGE}", msg.into()),
        }
    }

    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: msg.into(),
        }
    }

    pub(crate) fn runtime(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::runtime(e.to_string())
    }
}

/// Entry point for the binary: returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    match run_inner(&args) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("zitterlab: {}", f.message);
            f.code
        }
    }
}

struct CliArgs {
    mode: Mode,
    config_path: PathBuf,
    svg: bool,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

fn parse_args(args: &[String]) -> Result<Option<CliArgs>, Failure> {
    let mut it = args.iter();
    let Some(first) = it.next() else {
        return Err(Failure::usage("missing subcommand"));
    };
    if first == "--help" || first == "-h" {
        println!("{USAGE}");
        println!("  check     run the identity suites on randomized jets");
        println!("  simulate  integrate the reduced canonical system and export CSV/SVG");
        println!("  sweep     scan couplings and frequencies for helical solutions");
        return Ok(None);
    }
    let Some(mode) = Mode::from_name(first) else {
        return Err(Failure::usage(format!("unknown subcommand '{first}'")));
    };
    let mut config_path = None;
    let mut svg = false;
    let mut out = None;
    let mut seed = None;
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::usage("--config needs a path"))?;
                config_path = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::usage("--out needs a directory"))?;
                out = Some(PathBuf::from(v));
            }
            "--seed" => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::usage("--seed needs an integer"))?;
                seed = Some(v.parse().map_err(|_| {
                    Failure::usage(format!("--seed: '{v}' is not an unsigned integer"))
                })?);
            }
            "--svg" => svg = true,
            _ => return Err(Failure::usage(format!("unknown argument '{arg}'"))),
        }
    }
    let Some(config_path) = config_path else {
        return Err(Failure::usage("--config is required"));
    };
    Ok(Some(CliArgs {
        mode,
        config_path,
        svg,
        out,
        seed,
    }))
}

fn run_inner(args: &[String]) -> Result<(), Failure> {
    let Some(cli) = parse_args(args)? else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&cli.config_path).map_err(|e| {
        Failure::config(format!(
            "cannot read config {}: {e}",
            cli.config_path.display()
        ))
    })?;
    let mut cfg = parse_config(&text)
        .map_err(|e| Failure::config(format!("config {}: {e}", cli.config_path.display())))?;
    if let Some(m) = cfg.mode {
        if m != cli.mode {
            return Err(Failure::config(format!(
                "config mode '{}' does not match subcommand '{}'",
                m.name(),
                cli.mode.name()
            )));
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_dir = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    match cli.mode {
        Mode::Check => run_check(&cfg, &out_dir),
        Mode::Simulate => run_simulate(&cfg, &out_dir, cli.svg),
        Mode::Sweep => run_sweep(&cfg, &out_dir),
    }
}

fn maxabs4(v: FourVector) -> f64 {
    v.to_array().iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

fn maxabs3(v: ThreeVector) -> f64 {
    v.to_array().iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

/// Residual relative to a natural magnitude, floored at 1 so identities
/// near zero are judged absolutely.
fn rel(residual: f64, scale: f64) -> f64 {
    residual.abs() / scale.max(1.0)
}

// Contact-chart test functions for the derivative-correspondence suite: a
// small basis that exercises every slot the chain rule touches.
struct VComponent {
    c: usize,
}

impl ContactFunction for VComponent {
    fn order(&self) -> usize {
        1
    }
    fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
        c.v.component(self.c)
    }
}

struct OnePlusVSquare;

impl ContactFunction for OnePlusVSquare {
    fn order(&self) -> usize {
        1
    }
    fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
        S::from_f64(1.0) + dot3(c.v, c.v)
    }
}

struct MixedProduct;

impl ContactFunction for MixedProduct {
    fn order(&self) -> usize {
        2
    }
    fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
        dot3(c.v, c.vdot)
    }
}

/// Run every identity suite on `sample_count` seeded random jets and write
/// `report.txt` + `report.csv`.  Exits 1 when any suite exceeds tolerance.
fn run_check(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    cfg.validate_common().map_err(Failure::config)?;
    if cfg.sample_count == 0 {
        return Err(Failure::config(
            "sample_count = 0: an empty suite verifies nothing",
        ));
    }
    let params = cfg.params;
    let lagrangian = BoppLagrangian { params };
    let mut rng = XorShift64Star::new(cfg.seed);

    let mut suites = vec![
        Suite::new("zermelo_first", 1e-8),
        Suite::new("zermelo_second", 1e-8),
        Suite::new("momenta_ad_vs_explicit", 1e-7),
        Suite::new("orthogonality", 1e-8),
        Suite::new("legendre_energy", 1e-8),
        Suite::new("h_normalization", 1e-8),
        Suite::new("h_direct_form", 1e-9),
        Suite::new("elimination_velocity", 1e-9),
        Suite::new("elimination_curvature", 1e-9),
        Suite::new("density_factorization", 1e-10),
        Suite::new("lift_relation", 1e-7),
        Suite::new("pullback_wpp_time", 1e-7),
        Suite::new("pullback_wpp_space", 1e-7),
        Suite::new("pullback_wp_time", 1e-7),
        Suite::new("pullback_wp_space", 1e-7),
        Suite::new("correspondence", 1e-8),
    ];

    for _ in 0..cfg.sample_count {
        // One general timelike jet for the parametrization-free identities…
        let g = sample_timelike_jet(&mut rng, 4);
        // …and one future-pointing jet for everything that crosses into the
        // coordinate-time chart, which covers only the u⁰ > 0 sheet.
        let f = sample_future_timelike_jet(&mut rng, 3);

        let lag = bopp_lagrangian(&g, params)?;
        let (z1, z2) = zermelo_residuals(&lagrangian, &g);
        suites[0].record(rel(z1, lag.abs()));
        suites[1].record(rel(z2, lag.abs()));

        let (wp_e, wp1_e) = momenta_explicit(&g, params)?;
        let (wp_a, wp1_a) = momenta_ad(&lagrangian, &g)?;
        let mscale = maxabs4(wp_e).max(maxabs4(wp1_e));
        let mdiff = maxabs4(wp_e - wp_a).max(maxabs4(wp1_e - wp1_a));
        suites[2].record(rel(mdiff, mscale));

        let (r_orth, r_energy) = zermelo_momentum_residuals(&g, &lagrangian)?;
        suites[3].record(rel(r_orth, maxabs4(g.u) * maxabs4(wp1_a)));
        let energy_scale = lag.abs() + dot4(g.u, wp_a).abs() + dot4(g.udot, wp1_a).abs();
        suites[4].record(rel(r_energy, energy_scale));

        let q = dot4(g.u, g.u);
        let norm = q.sqrt();
        let norm3 = q * norm;
        let wp1_sq = dot4(wp1_e, wp1_e);
        let h_scale = dot4(wp_e, g.u).abs()
            + (norm3 * wp1_sq / (2.0 * params.a)).abs()
            + (params.big_a / 2.0 * norm).abs();
        suites[5].record(rel(h_on_legendre_residual(&g, params)?, h_scale));

        let direct_scale = lag.abs() + dot4(wp_e, g.u).abs() + dot4(wp1_e, g.udot).abs();
        suites[6].record(rel(direct_form_residual(&g, params)?, direct_scale));

        let (e1, e2) = elimination_identities(&g, params)?;
        suites[7].record(rel(
            e1,
            dot4(wp1_e, g.udot).abs() + (norm3 * wp1_sq / params.a).abs(),
        ));
        suites[8].record(rel(
            e2,
            (lag - params.big_a / 2.0 * norm).abs()
                + (norm3 * wp1_sq / (2.0 * params.a * params.a)).abs(),
        ));

        let lag_f = bopp_lagrangian(&f, params)?;
        let contact = project_contact(&f)?;
        let density = contact_density(&contact, params)?;
        suites[9].record(rel(f.u.t * density - lag_f, lag_f.abs()));

        let (wp_f, wp1_f) = momenta_explicit(&f, params)?;
        let cm = contact_momenta(&contact, params)?;
        let ch = contact_h(
            &ContactState {
                x0: contact.x0,
                x: contact.x,
                v: contact.v,
                p: cm.p,
                p1: cm.p1,
            },
            params,
        )?;
        let lift_scale = f.u.t.abs() * (ch.abs() + wp_f.t.abs()) + 1.0;
        suites[10].record(rel(lift_relation_residual(&f, params)?, lift_scale));

        let pb = pullback_residuals_scaled(&f, params, wp_f, wp1_f, cm.p, cm.p1)?;
        for (k, r) in pb.iter().enumerate() {
            suites[11 + k].record(*r);
        }

        suites[15].record(rel(correspondence_residual(&VComponent { c: 0 }, &f)?, 1.0));
        suites[15].record(rel(correspondence_residual(&VComponent { c: 1 }, &f)?, 1.0));
        suites[15].record(rel(correspondence_residual(&VComponent { c: 2 }, &f)?, 1.0));
        suites[15].record(rel(correspondence_residual(&OnePlusVSquare, &f)?, 1.0));
        suites[15].record(rel(correspondence_residual(&MixedProduct, &f)?, 1.0));
    }

    let txt = report_txt(params, cfg.seed, cfg.sample_count, &suites);
    ensure_dir(out_dir)?;
    write_text(&out_dir.join("report.txt"), &txt)?;
    write_text(&out_dir.join("report.csv"), &report_csv(&suites))?;
    print!("{txt}");

    let failed = suites.iter().filter(|s| !s.passed()).count();
    if failed > 0 {
        return Err(Failure::runtime(format!(
            "{failed} suite(s) exceeded tolerance"
        )));
    }
    Ok(())
}

fn pullback_residuals_scaled(
    f: &crate::jetcalc::JetPoint,
    params: crate::lagrangians::BoppParams,
    wp: FourVector,
    wp1: FourVector,
    p: ThreeVector,
    p1: ThreeVector,
) -> Result<[f64; 4], Failure> {
    let raw = crate::legendre::pullback_residuals(f, params)?;
    let scale = maxabs4(wp)
        .max(maxabs4(wp1))
        .max(maxabs3(p))
        .max(maxabs3(p1));
    Ok([
        rel(raw[0], scale),
        rel(raw[1], scale),
        rel(raw[2], scale),
        rel(raw[3], scale),
    ])
}

/// Integrate one trajectory from config initial data and export
/// `trajectory.csv`, `monitors.csv` and optionally `plot.svg`.
fn run_simulate(cfg: &RunConfig, out_dir: &Path, svg: bool) -> Result<(), Failure> {
    cfg.validate_common().map_err(Failure::config)?;
    let params = cfg.params;
    let s0 = match (&cfg.initial, &cfg.helix) {
        (None, None) => {
            return Err(Failure::config(
                "simulate needs [initial]: either u0/udot0/uddot0 or omega (+ phase)",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(Failure::config(
                "simulate initial data is ambiguous: both explicit jet and helix given",
            ))
        }
        (Some(init), None) => make_initial_state(init.u0, init.udot0, init.uddot0, params)
            .map_err(|e| Failure::config(format!("invalid initial data: {e}")))?,
        (None, Some(hs)) => helix(params, hs.omega, hs.phase)
            .map_err(|e| Failure::runtime(e.to_string()))?
            .state(0.0),
    };
    let rhs = |s: &CanonicalState| reduced_rhs_tol(s, params, STAGE_GAUGE_TOLERANCE);
    let traj = integrate(&rhs, &s0, cfg.tau_end, cfg.step, params)
        .map_err(|e| Failure::runtime(format!("integration failed: {e}")))?;

    ensure_dir(out_dir)?;
    write_text(&out_dir.join("trajectory.csv"), &trajectory_csv(&traj))?;
    write_text(&out_dir.join("monitors.csv"), &monitors_csv(&traj))?;
    if svg {
        write_text(&out_dir.join("plot.svg"), &svg_plot(&traj))?;
    }
    let (dh, du, dwp) = monitor_drifts(&traj);
    println!(
        "simulate: {} samples to tau = {}; |H-1| <= {:e}, |u^2-1| <= {:e}, wp drift <= {:e}",
        traj.samples.len(),
        traj.samples.last().map(|(t, _)| *t).unwrap_or(0.0),
        dh,
        du,
        dwp
    );
    Ok(())
}

fn monitor_drifts(traj: &Trajectory) -> (f64, f64, f64) {
    let mut dh = 0.0f64;
    let mut du = 0.0f64;
    let mut dwp = 0.0f64;
    for m in &traj.monitors {
        dh = dh.max((m.h - 1.0).abs());
        du = du.max((m.u_sq - 1.0).abs());
        dwp = dwp.max(m.wp_drift);
    }
    (dh, du, dwp)
}

fn error_token(e: &Error) -> &'static str {
    match e {
        Error::StepRejected { .. } => "step_rejected",
        Error::GaugeViolation { .. } => "gauge_violation",
        Error::NotHelical { .. } => "not_helical",
        Error::NonTimelike { .. } => "non_timelike",
        Error::NoHelix { .. } => "no_helix",
        _ => "error",
    }
}

fn sweep_row(params: crate::lagrangians::BoppParams, omega: f64, cfg: &RunConfig) -> SweepRow {
    let mut row = SweepRow {
        a: params.a,
        big_a: params.big_a,
        omega,
        helix: false,
        measured_freq: None,
        measured_phi_sq: None,
        max_h_drift: None,
        max_u_sq_drift: None,
        max_wp_drift: None,
        status: "ok".to_string(),
    };
    let h = match helix(params, omega, 0.0) {
        Err(Error::NoHelix { .. }) => return row,
        Err(e) => {
            row.status = error_token(&e).to_string();
            return row;
        }
        Ok(h) => h,
    };
    row.helix = true;
    let rhs = |s: &CanonicalState| reduced_rhs_tol(s, params, STAGE_GAUGE_TOLERANCE);
    let traj = match integrate(&rhs, &h.state(0.0), cfg.tau_end, cfg.step, params) {
        Err(e) => {
            row.status = error_token(&e).to_string();
            return row;
        }
        Ok(t) => t,
    };
    let (dh, du, dwp) = monitor_drifts(&traj);
    row.max_h_drift = Some(dh);
    row.max_u_sq_drift = Some(du);
    row.max_wp_drift = Some(dwp);
    match riewe_form_check(&traj, params) {
        Ok((freq, _)) => {
            row.measured_freq = Some(freq);
            row.measured_phi_sq = Some(freq * freq);
        }
        Err(e) => row.status = error_token(&e).to_string(),
    }
    row
}

/// Scan the (A, ω) grid for helical solutions and write `summary.csv`.
/// Row-level failures land in the status column; the sweep never aborts.
fn run_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    cfg.validate_common().map_err(Failure::config)?;
    if cfg.sweep_big_a.is_empty() || cfg.sweep_omega.is_empty() {
        return Err(Failure::config(
            "empty sweep grid: [sweep] needs non-empty A_values and omega_values",
        ));
    }
    let mut rows = Vec::new();
    for &big_a in &cfg.sweep_big_a {
        for &omega in &cfg.sweep_omega {
            let params = crate::lagrangians::BoppParams {
                a: cfg.params.a,
                big_a,
            };
            rows.push(sweep_row(params, omega, cfg));
        }
    }
    ensure_dir(out_dir)?;
    write_text(&out_dir.join("summary.csv"), &summary_csv(&rows))?;
    println!("sweep: {} rows", rows.len());
    Ok(())
}
