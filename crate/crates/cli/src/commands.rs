//! Subcommand bodies. Each returns its rendered output plus the tolerance
//! checks it ran.

use anyhow::{Context, Result};
use mimo_dof::estimator::{GenieChoice, DEFAULT_STEP_DB, DEFAULT_TRIALS, DEFAULT_WINDOW_DB};
use mimo_dof::formulas::{
    canonicalize, dof_bc, dof_int_resolve, dof_mac, dof_ptp, dof_relay_min_cut, dof_relay_upper,
    dof_share_transmit, dof_x_lower, dof_z,
};
use mimo_dof::schemes::{genie_sides, GenieSide};
use mimo_dof::{
    estimate_dof, path_gain, snr_grid, sweep_rates, AntennaConfig, LinkGains, NetworkScheme,
    RateCurve, RelayConfig, SchemeKind, SlopeEstimate, SnrGrid,
};

use crate::output::{fmt_num, write_csv, ResultRow};

/// Entries of the reference interference-channel table, as `(M1, N1, M2, N2)`.
pub const TABLE_ROWS: [(usize, usize, usize, usize); 8] = [
    (1, 1, 1, 1),
    (1, 2, 1, 2),
    (2, 1, 2, 1),
    (1, 2, 2, 1),
    (3, 2, 2, 3),
    (2, 3, 2, 3),
    (2, 3, 1, 3),
    (2, 2, 3, 2),
];

pub const TABLE_TOLERANCE: f64 = 0.15;
pub const ESTIMATE_TOLERANCE: f64 = 0.15;
pub const COOP_TOLERANCE: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GAMMA: f64 = 2.0;
/// Width of the slope window, anchored at the top of the grid.
pub const WINDOW_WIDTH_DB: f64 = DEFAULT_WINDOW_DB.1 - DEFAULT_WINDOW_DB.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub trials: usize,
    pub snr_lo: f64,
    pub snr_hi: f64,
    pub snr_step: f64,
    pub seed: u64,
    pub gamma: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            snr_lo: DEFAULT_WINDOW_DB.0,
            snr_hi: DEFAULT_WINDOW_DB.1,
            snr_step: DEFAULT_STEP_DB,
            seed: DEFAULT_SEED,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl RunParams {
    pub fn grid(&self) -> Result<SnrGrid> {
        Ok(snr_grid(self.snr_lo, self.snr_hi, self.snr_step)?)
    }

    /// The top `WINDOW_WIDTH_DB` of the grid.
    pub fn window(&self) -> (f64, f64) {
        (
            (self.snr_hi - WINDOW_WIDTH_DB).max(self.snr_lo),
            self.snr_hi,
        )
    }

    fn preamble(&self, command: &str) -> Vec<String> {
        let (lo, hi) = self.window();
        vec![
            format!("mimo-dof {} {command}", env!("CARGO_PKG_VERSION")),
            format!(
                "trials={} snr-lo={} snr-hi={} snr-step={} window={}..{} gamma={} seed={}",
                self.trials,
                fmt_num(self.snr_lo),
                fmt_num(self.snr_hi),
                fmt_num(self.snr_step),
                fmt_num(lo),
                fmt_num(hi),
                fmt_num(self.gamma),
                self.seed
            ),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.value - self.target).abs() <= self.tolerance
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {:.3} vs {} (tol {})",
            if self.passed() { "ok  " } else { "FAIL" },
            self.label,
            self.value,
            fmt_num(self.target),
            self.tolerance
        )
    }
}

#[derive(Debug, Default)]
pub struct Output {
    pub body: Vec<u8>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub written_to: Option<std::path::PathBuf>,
}

impl Output {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn text_output(params: &RunParams, command: &str, lines: Vec<String>) -> Output {
    let mut body = String::new();
    for line in params.preamble(command) {
        body.push_str(&format!("# {line}\n"));
    }
    for line in lines {
        body.push_str(&line);
        body.push('\n');
    }
    Output {
        body: body.into_bytes(),
        ..Output::default()
    }
}

fn bounds_line(b: mimo_dof::DofBounds) -> String {
    let exact = b.exact.map_or("none".to_string(), |e| e.to_string());
    format!("inner {}, outer {}, exact {exact}", b.inner, b.outer)
}

pub fn cmd_bounds(params: &RunParams, config: AntennaConfig) -> Output {
    let (canon, swapped) = canonicalize(config);
    let z = dof_z(config);
    let lines = vec![
        format!("config {config}"),
        format!(
            "canonical {canon}{}",
            if swapped { " (links swapped)" } else { "" }
        ),
        format!("interference {}", bounds_line(dof_int_resolve(config))),
        format!("x-channel lower {}", dof_x_lower(config)),
        format!("z-channel {}", bounds_line(z)),
    ];
    text_output(params, "bounds", lines)
}

pub fn cmd_relay(params: &RunParams, relay: RelayConfig) -> Output {
    let lines = vec![
        format!("relay {relay}"),
        format!("min-cut {}", dof_relay_min_cut(relay)),
        format!("upper {}", dof_relay_upper(relay)),
    ];
    text_output(params, "relay", lines)
}

pub fn cmd_xz(params: &RunParams, config: AntennaConfig) -> Output {
    let lines = vec![
        format!("config {config}"),
        format!("x-channel lower {}", dof_x_lower(config)),
        format!("z-channel {}", bounds_line(dof_z(config))),
    ];
    text_output(params, "xz", lines)
}

/// `(inner, outer)` DoF of the network a scheme runs on.
pub fn scheme_bounds(kind: SchemeKind, config: AntennaConfig) -> (f64, f64) {
    let (m1, n1, m2, n2) = config.as_tuple();
    let same = |v: usize| (v as f64, v as f64);
    match kind {
        SchemeKind::Ptp => same(dof_ptp(m1, n1)),
        SchemeKind::MacZf => same(dof_mac(m1, m2, n1)),
        SchemeKind::BcZf => same(dof_bc(m1, n1, n2)),
        SchemeKind::IntZf | SchemeKind::IntGenie(_) => {
            let b = dof_int_resolve(config);
            (b.inner as f64, b.outer as f64)
        }
        SchemeKind::ShareTransmit => {
            let r = dof_share_transmit(m1, n1);
            let v = *r.numer() as f64 / *r.denom() as f64;
            (v, v)
        }
    }
}

/// Slope the scheme's rate curve should reach.
pub fn expected_slope(kind: SchemeKind, config: AntennaConfig) -> f64 {
    let (m1, n1, m2, n2) = config.as_tuple();
    let genie = |side: GenieSide| match side {
        GenieSide::Receiver1 => (m1 + m2).min(n1),
        GenieSide::Receiver2 => (m1 + m2).min(n2),
    };
    match kind {
        SchemeKind::IntGenie(GenieChoice::Tightest) => genie_sides(config)
            .into_iter()
            .map(genie)
            .min()
            .map_or(f64::NAN, |v| v as f64),
        SchemeKind::IntGenie(GenieChoice::Only(side)) => genie(side) as f64,
        _ => scheme_bounds(kind, config).0,
    }
}

struct Sweep<'a> {
    scenario: &'a str,
    config: AntennaConfig,
    label: &'a str,
    bounds: (f64, f64),
}

impl Sweep<'_> {
    fn rows(&self, curve: &RateCurve, est: &SlopeEstimate, seed: u64) -> Vec<ResultRow> {
        let (inner, outer) = self.bounds;
        let exact = (inner == outer).then_some(inner);
        let row = |snr_db: f64, sum_rate: f64| ResultRow {
            scenario: self.scenario.to_string(),
            config: self.config.to_string(),
            scheme: self.label.to_string(),
            snr_db,
            sum_rate,
            dof_inner: inner,
            dof_outer: outer,
            dof_exact: exact,
            dof_hat: None,
            stderr: None,
            seed,
        };
        let mut rows: Vec<ResultRow> = curve
            .points
            .iter()
            .zip(&curve.point_stderr)
            .map(|(p, &se)| ResultRow {
                stderr: Some(se),
                ..row(p.snr_db, p.sum_rate)
            })
            .collect();
        let top = curve
            .points
            .iter()
            .rev()
            .find(|p| p.snr_db <= est.window_db.1 + 1e-9)
            .expect("window holds curve points");
        rows.push(ResultRow {
            scheme: format!("{}:slope", self.label),
            dof_hat: Some(est.dof_hat),
            stderr: Some(est.stderr),
            ..row(top.snr_db, top.sum_rate)
        });
        rows
    }
}

fn sweep(
    scheme: &NetworkScheme,
    grid: &SnrGrid,
    params: &RunParams,
) -> Result<(RateCurve, SlopeEstimate)> {
    let curve = sweep_rates(scheme, grid, params.trials, params.seed)?;
    let est = estimate_dof(&curve, params.window())?;
    Ok((curve, est))
}

fn csv_output(
    params: &RunParams,
    command: &str,
    rows: &[ResultRow],
    checks: Vec<Check>,
    notes: Vec<String>,
) -> Result<Output> {
    let mut body = Vec::new();
    write_csv(&mut body, &params.preamble(command), rows)?;
    Ok(Output {
        body,
        checks,
        notes,
        written_to: None,
    })
}

pub fn cmd_table(params: &RunParams) -> Result<Output> {
    let grid = params.grid()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (i, &(m1, n1, m2, n2)) in TABLE_ROWS.iter().enumerate() {
        let config = AntennaConfig::new(m1, n1, m2, n2)?;
        let scenario = format!("table-{}", i + 1);
        let scheme = NetworkScheme::new(SchemeKind::IntZf, config, LinkGains::unit())?;
        let (curve, est) =
            sweep(&scheme, &grid, params).with_context(|| format!("{scenario} ({config})"))?;
        let bounds = dof_int_resolve(config);
        let exact = bounds.exact.context("table entry without an exact value")? as f64;
        let s = Sweep {
            scenario: &scenario,
            config,
            label: SchemeKind::IntZf.label(),
            bounds: (bounds.inner as f64, bounds.outer as f64),
        };
        rows.extend(s.rows(&curve, &est, params.seed));
        checks.push(Check {
            label: format!("{scenario} {config} int-zf slope"),
            value: est.dof_hat,
            target: exact,
            tolerance: TABLE_TOLERANCE,
        });
    }
    csv_output(params, "table", &rows, checks, vec![])
}

pub fn cmd_estimate(params: &RunParams, config: AntennaConfig, kind: SchemeKind) -> Result<Output> {
    let grid = params.grid()?;
    let scheme = NetworkScheme::new(kind, config, LinkGains::unit())?;
    let (curve, est) =
        sweep(&scheme, &grid, params).with_context(|| format!("{kind} on {config}"))?;
    let s = Sweep {
        scenario: "estimate",
        config,
        label: kind.label(),
        bounds: scheme_bounds(kind, config),
    };
    let rows = s.rows(&curve, &est, params.seed);
    let checks = vec![Check {
        label: format!("{kind} slope on {config}"),
        value: est.dof_hat,
        target: expected_slope(kind, config),
        tolerance: ESTIMATE_TOLERANCE,
    }];
    let notes = vec![format!("dof_hat {:.4} +/- {:.4}", est.dof_hat, est.stderr)];
    csv_output(params, "estimate", &rows, checks, notes)
}

/// Distances for the cooperation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Between the two transmitters.
    pub d_tt: f64,
    /// From each transmitter to each receiver.
    pub d_tr: f64,
}

pub const TRANSMIT_ONLY: &str = "transmit-only";
pub const SHARE_TRANSMIT: &str = "share-transmit";

pub fn cmd_coop(params: &RunParams, m: usize, n: usize, geometry: Geometry) -> Result<Output> {
    let grid = params.grid()?;
    let config = AntennaConfig::new(m, n, m, n)?;
    let link = LinkGains::uniform(path_gain(geometry.d_tr, params.gamma)?);
    let sharing_gain = path_gain(geometry.d_tt, params.gamma)?;
    let transmit_only = NetworkScheme::new(SchemeKind::IntZf, config, link)?;
    let share = NetworkScheme::new(SchemeKind::ShareTransmit, config, link)?
        .with_sharing_gain(sharing_gain)?;

    let (to_curve, to_est) = sweep(&transmit_only, &grid, params).context(TRANSMIT_ONLY)?;
    let (st_curve, st_est) = sweep(&share, &grid, params).context(SHARE_TRANSMIT)?;

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (label, kind, curve, est) in [
        (TRANSMIT_ONLY, SchemeKind::IntZf, &to_curve, &to_est),
        (
            SHARE_TRANSMIT,
            SchemeKind::ShareTransmit,
            &st_curve,
            &st_est,
        ),
    ] {
        let s = Sweep {
            scenario: "coop",
            config,
            label,
            bounds: scheme_bounds(kind, config),
        };
        rows.extend(s.rows(curve, est, params.seed));
        checks.push(Check {
            label: format!("{label} slope"),
            value: est.dof_hat,
            target: expected_slope(kind, config),
            tolerance: COOP_TOLERANCE,
        });
    }
    let ahead = to_curve
        .points
        .iter()
        .zip(&st_curve.points)
        .filter(|(a, b)| a.sum_rate >= b.sum_rate)
        .count();
    let notes = vec![
        format!(
            "slopes: {TRANSMIT_ONLY} {:.4}, {SHARE_TRANSMIT} {:.4}",
            to_est.dof_hat, st_est.dof_hat
        ),
        format!(
            "{TRANSMIT_ONLY} >= {SHARE_TRANSMIT} at {ahead} of {} points",
            grid.len()
        ),
    ];
    csv_output(params, "coop", &rows, checks, notes)
}

/// Gnuplot script drawing both cooperation curves from `csv_path`.
pub fn coop_plot_script(csv_path: &str) -> String {
    let path = csv_path.replace('\'', "''");
    let curve = |label: &str| {
        format!(
            "'{path}' using 4:(strcol(3) eq '{label}' ? $5 : NaN) with linespoints title '{label}'"
        )
    };
    format!(
        "set datafile separator ','\n\
         set key left top\n\
         set xlabel 'transmit power (dB)'\n\
         set ylabel 'sum rate (bits per channel use)'\n\
         plot {}, \\\n     {}\n",
        curve(TRANSMIT_ONLY),
        curve(SHARE_TRANSMIT)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> AntennaConfig {
        s.parse().unwrap()
    }

    #[test]
    fn window_tracks_top_of_grid() {
        let p = RunParams::default();
        assert_eq!(p.window(), (40.0, 60.0));
        let p = RunParams { snr_lo: 0.0, ..p };
        assert_eq!(p.window(), (40.0, 60.0));
        let p = RunParams {
            snr_lo: 50.0,
            snr_hi: 65.0,
            ..p
        };
        assert_eq!(p.window(), (50.0, 65.0));
    }

    #[test]
    fn expected_slopes() {
        assert_eq!(expected_slope(SchemeKind::IntZf, cfg("2,3,2,3")), 3.0);
        assert_eq!(
            expected_slope("int-genie".parse().unwrap(), cfg("2,3,2,3")),
            3.0
        );
        assert_eq!(
            expected_slope("int-genie-r2".parse().unwrap(), cfg("2,1,1,2")),
            2.0
        );
        assert_eq!(
            expected_slope("int-genie".parse().unwrap(), cfg("2,1,1,2")),
            1.0
        );
        assert_eq!(
            expected_slope(SchemeKind::ShareTransmit, cfg("4,1,4,1")),
            1.6
        );
        assert_eq!(expected_slope(SchemeKind::MacZf, cfg("2,4,2,1")), 4.0);
        assert_eq!(expected_slope(SchemeKind::BcZf, cfg("8,2,1,2")), 4.0);
    }

    #[test]
    fn bounds_report() {
        let out = cmd_bounds(&RunParams::default(), cfg("2,2,3,2"));
        let text = String::from_utf8(out.body).unwrap();
        assert!(text.contains("canonical 3,2,2,2 (links swapped)"));
        assert!(text.contains("interference inner 2, outer 2, exact 2"));
        assert!(text.starts_with("# mimo-dof"));
    }

    #[test]
    fn plot_script_names_both_curves() {
        let s = coop_plot_script("out.csv");
        assert!(
            s.contains("'transmit-only'")
                && s.contains("'share-transmit'")
                && s.contains("'out.csv'")
        );
    }
}
