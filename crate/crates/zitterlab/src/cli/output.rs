//! Deterministic file emission: CSV schemas, the check report, and a
//! minimal hand-built SVG plot.  All floating-point rendering goes through
//! Rust's shortest round-trip formatter (plain for coordinates, exponent
//! form for residuals), so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use super::Failure;
use crate::dynamics::Trajectory;

/// Shortest round-trip decimal rendering.
pub(super) fn fmt_plain(x: f64) -> String {
    format!("{x}")
}

/// Shortest round-trip exponent rendering (for residual magnitudes).
pub(super) fn fmt_exp(x: f64) -> String {
    format!("{x:e}")
}

pub(super) fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::runtime(format!("cannot create output directory {dir:?}: {e}")))
}

pub(super) fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::runtime(format!("cannot write {path:?}: {e}")))
}

/// `trajectory.csv`: one row per sample, canonical state flattened.
pub(super) fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("tau,x0,x1,x2,x3,u0,u1,u2,u3,wp0,wp1,wp2,wp3,wpp0,wpp1,wpp2,wpp3\n");
    for (tau, s) in &traj.samples {
        let mut row = vec![fmt_plain(*tau)];
        for v in [s.x, s.u, s.wp, s.wp1] {
            row.extend(v.to_array().iter().map(|c| fmt_plain(*c)));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `monitors.csv`: conserved-quantity tracking per sample.
pub(super) fn monitors_csv(traj: &Trajectory) -> String {
    let mut out = String::from("tau,H,u_sq,wp_drift\n");
    for m in &traj.monitors {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_plain(m.tau),
            fmt_plain(m.h),
            fmt_plain(m.u_sq),
            fmt_plain(m.wp_drift)
        );
    }
    out
}

/// One identity suite: the worst residual seen against its tolerance.
#[derive(Debug, Clone)]
pub(super) struct Suite {
    pub name: &'static str,
    pub tolerance: f64,
    pub max: f64,
}

impl Suite {
    pub fn new(name: &'static str, tolerance: f64) -> Self {
        Suite {
            name,
            tolerance,
            max: 0.0,
        }
    }

    pub fn record(&mut self, residual: f64) {
        // NaN must never slip through a max(); order the comparison so a
        // NaN residual replaces the current maximum.
        if !(residual <= self.max) {
            self.max = residual;
        }
    }

    pub fn passed(&self) -> bool {
        self.max <= self.tolerance
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `report.txt`: human-readable suite table.
pub(super) fn report_txt(
    params: crate::lagrangians::BoppParams,
    seed: u64,
    samples: usize,
    suites: &[Suite],
) -> String {
    let mut out = String::from("zitterlab identity-suite report\n");
    let _ = writeln!(out, "samples: {samples}");
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(out, "a: {}", fmt_plain(params.a));
    let _ = writeln!(out, "A: {}", fmt_plain(params.big_a));
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<26} {:<24} {:<10} status",
        "suite", "max_residual", "tolerance"
    );
    for s in suites {
        let _ = writeln!(
            out,
            "{:<26} {:<24} {:<10} {}",
            s.name,
            fmt_exp(s.max),
            fmt_exp(s.tolerance),
            status(s.passed())
        );
    }
    out.push('\n');
    let _ = writeln!(out, "overall: {}", status(suites.iter().all(Suite::passed)));
    out
}

/// `report.csv`: machine-readable twin of the report.
pub(super) fn report_csv(suites: &[Suite]) -> String {
    let mut out = String::from("suite,max_residual,tolerance,status\n");
    for s in suites {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.name,
            fmt_exp(s.max),
            fmt_exp(s.tolerance),
            status(s.passed())
        );
    }
    out
}

/// One `summary.csv` row of a parameter sweep.
#[derive(Debug, Clone)]
pub(super) struct SweepRow {
    pub a: f64,
    pub big_a: f64,
    pub omega: f64,
    pub helix: bool,
    pub measured_freq: Option<f64>,
    pub measured_phi_sq: Option<f64>,
    pub max_h_drift: Option<f64>,
    pub max_u_sq_drift: Option<f64>,
    pub max_wp_drift: Option<f64>,
    pub status: String,
}

pub(super) fn summary_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_plain).unwrap_or_default();
    let mut out = String::from(
        "a,A,omega,helix,measured_freq,measured_phi_sq,max_H_drift,max_u_sq_drift,max_wp_drift,status\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_plain(r.a),
            fmt_plain(r.big_a),
            fmt_plain(r.omega),
            if r.helix { "yes" } else { "no" },
            opt(r.measured_freq),
            opt(r.measured_phi_sq),
            opt(r.max_h_drift),
            opt(r.max_u_sq_drift),
            opt(r.max_wp_drift),
            r.status
        );
    }
    out
}

/// `plot.svg`: the x¹–x² projection of the worldline as one polyline in a
/// 640×640 viewport with a 20-unit margin, aspect ratio preserved.  At
/// most ~2000 vertices are emitted (uniform stride, endpoint kept).
pub(super) fn svg_plot(traj: &Trajectory) -> String {
    const SIZE: f64 = 640.0;
    const MARGIN: f64 = 20.0;
    let points: Vec<(f64, f64)> = traj.samples.iter().map(|(_, s)| (s.x.s1, s.x.s2)).collect();

    let (mut min1, mut max1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min2, mut max2) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p1, p2) in &points {
        min1 = min1.min(*p1);
        max1 = max1.max(*p1);
        min2 = min2.min(*p2);
        max2 = max2.max(*p2);
    }
    let span = (max1 - min1).max(max2 - min2);
    let inner = SIZE - 2.0 * MARGIN;
    // Degenerate (single point / zero extent) plots collapse to the centre.
    let scale = if span > 1e-300 { inner / span } else { 0.0 };
    let pad1 = (span - (max1 - min1)) / 2.0;
    let pad2 = (span - (max2 - min2)) / 2.0;

    let stride = (points.len() / 2000).max(1);
    let mut path = String::new();
    let mut emit = |p1: f64, p2: f64| {
        let px = MARGIN + (p1 - min1 + pad1) * scale + if scale == 0.0 { inner / 2.0 } else { 0.0 };
        let py = SIZE
            - MARGIN
            - (p2 - min2 + pad2) * scale
            - if scale == 0.0 { inner / 2.0 } else { 0.0 };
        let _ = write!(path, "{px:.3},{py:.3} ");
    };
    for (i, (p1, p2)) in points.iter().enumerate() {
        if i % stride == 0 {
            emit(*p1, *p2);
        }
    }
    // Keep the endpoint when the stride skipped it.
    if !points.is_empty() && (points.len() - 1) % stride != 0 {
        let (p1, p2) = points[points.len() - 1];
        emit(p1, p2);
    }

    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 640\">\n",
            "  <rect width=\"640\" height=\"640\" fill=\"white\"/>\n",
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
            "</svg>\n"
        ),
        path.trim_end()
    )
}
