//! Command-line parsing and dispatch.

use std::path::{Path, PathBuf};

use crate::commands::{self, Geometry, Output, RunParams};
use crate::scenario::ScenarioFile;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mimo_dof::{AntennaConfig, RelayConfig, SchemeKind};

/// Degrees-of-freedom bounds and Monte Carlo slope checks for two-user
/// MIMO networks.
#[derive(Debug, Parser)]
#[command(name = "mimo-dof", version)]
pub struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Channel draws per SNR point [default: 20]
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Lowest SNR in dB [default: 40, or 0 for coop]
    #[arg(long, global = true, allow_negative_numbers = true)]
    snr_lo: Option<f64>,
    /// Highest SNR in dB [default: 60]
    #[arg(long, global = true, allow_negative_numbers = true)]
    snr_hi: Option<f64>,
    /// SNR step in dB [default: 5]
    #[arg(long, global = true)]
    snr_step: Option<f64>,
    /// Base seed for channel draws [default: 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Path-loss exponent [default: 2]
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Read `key = value` settings from this file
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interference, X and Z channel bounds for `m1,n1,m2,n2`
    Bounds { config: Option<AntennaConfig> },
    /// Monte Carlo check of the reference interference-channel table
    Table,
    /// Rate curve and fitted slope of one scheme
    Estimate {
        config: Option<AntennaConfig>,
        /// ptp, mac-zf, bc-zf, int-zf, int-genie, int-genie-r1, int-genie-r2 or share-transmit
        scheme: Option<SchemeKind>,
    },
    /// Transmit-only versus share-and-transmit on a symmetric (m,n,m,n) network
    Coop {
        m: Option<usize>,
        n: Option<usize>,
        /// Distance between the transmitters [default: 1]
        #[arg(long)]
        d_tt: Option<f64>,
        /// Distance from each transmitter to each receiver [default: 1]
        #[arg(long)]
        d_tr: Option<f64>,
        /// Also write a gnuplot script for the CSV (needs --out)
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Relay DoF upper bound for `ms,mr,md`
    Relay { config: Option<RelayConfig> },
    /// X channel lower bound and Z channel bounds for `m1,n1,m2,n2`
    Xz { config: Option<AntennaConfig> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Table => "table",
            Command::Estimate { .. } => "estimate",
            Command::Coop { .. } => "coop",
            Command::Relay { .. } => "relay",
            Command::Xz { .. } => "xz",
        }
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.with_context(|| {
        format!("missing `{key}`: pass it on the command line or in the scenario file")
    })
}

/// Runs a parsed command line. Output goes to `--out` when given and is
/// otherwise left in the returned body for the caller to print.
pub fn run(cli: Cli) -> Result<Output> {
    let mut file = match &cli.opts.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ScenarioFile::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ScenarioFile::default(),
    };
    file.take::<String>("kind", Some(cli.command.name().to_string()))?;

    let defaults = RunParams::default();
    let default_lo = match cli.command {
        Command::Coop { .. } => 0.0,
        _ => defaults.snr_lo,
    };
    let o = cli.opts;
    let params = RunParams {
        trials: file.take("trials", o.trials)?.unwrap_or(defaults.trials),
        snr_lo: file.take("snr-lo", o.snr_lo)?.unwrap_or(default_lo),
        snr_hi: file.take("snr-hi", o.snr_hi)?.unwrap_or(defaults.snr_hi),
        snr_step: file
            .take("snr-step", o.snr_step)?
            .unwrap_or(defaults.snr_step),
        seed: file.take("seed", o.seed)?.unwrap_or(defaults.seed),
        gamma: file.take("gamma", o.gamma)?.unwrap_or(defaults.gamma),
    };
    let out = file.take("out", o.out)?;

    let output = match cli.command {
        Command::Bounds { config } => {
            let config = required(file.take("config", config)?, "config")?;
            file.finish()?;
            commands::cmd_bounds(&params, config)
        }
        Command::Xz { config } => {
            let config = required(file.take("config", config)?, "config")?;
            file.finish()?;
            commands::cmd_xz(&params, config)
        }
        Command::Relay { config } => {
            let config = required(file.take("config", config)?, "config")?;
            file.finish()?;
            commands::cmd_relay(&params, config)
        }
        Command::Table => {
            file.finish()?;
            commands::cmd_table(&params)?
        }
        Command::Estimate { config, scheme } => {
            let config = required(file.take("config", config)?, "config")?;
            let scheme = required(file.take("scheme", scheme)?, "scheme")?;
            file.finish()?;
            commands::cmd_estimate(&params, config, scheme)?
        }
        Command::Coop {
            m,
            n,
            d_tt,
            d_tr,
            plot,
        } => {
            let m = required(file.take("m", m)?, "m")?;
            let n = required(file.take("n", n)?, "n")?;
            let geometry = Geometry {
                d_tt: file.take("d-tt", d_tt)?.unwrap_or(1.0),
                d_tr: file.take("d-tr", d_tr)?.unwrap_or(1.0),
            };
            let plot = file.take("plot", plot)?;
            file.finish()?;
            let output = commands::cmd_coop(&params, m, n, geometry)?;
            if let Some(script) = plot {
                let Some(csv) = &out else {
                    bail!("--plot needs --out so the script can point at the CSV");
                };
                write_file(
                    &script,
                    commands::coop_plot_script(&csv.to_string_lossy()).as_bytes(),
                )?;
            }
            output
        }
    };

    let mut output = output;
    if let Some(path) = out {
        write_file(&path, &output.body)?;
        output.written_to = Some(path);
    }
    Ok(output)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Output> {
        let cli = Cli::try_parse_from(std::iter::once("mimo-dof").chain(args.iter().copied()))?;
        run(cli)
    }

    fn body(args: &[&str]) -> String {
        String::from_utf8(run_args(args).unwrap().body).unwrap()
    }

    fn scenario(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn bounds_from_positional_or_file() {
        let direct = body(&["bounds", "5,1,5,1"]);
        assert!(direct.contains("interference inner 2, outer 2, exact 2"));
        let f = scenario("# five by one\nconfig = 5,1,5,1\n");
        let via_file = body(&["bounds", "--scenario", f.path().to_str().unwrap()]);
        assert_eq!(direct, via_file);
    }

    #[test]
    fn relay_and_xz_reports() {
        assert!(body(&["relay", "1,5,4"]).contains("upper 1"));
        let xz = body(&["xz", "1,2,1,2"]);
        assert!(
            xz.contains("x-channel lower 2") && xz.contains("z-channel inner 2, outer 2, exact 2")
        );
    }

    #[test]
    fn scenario_conflicts_are_errors() {
        let f = scenario("trials = 4\nconfig = 2,3,2,3\nscheme = int-zf\n");
        let path = f.path().to_str().unwrap();
        assert!(run_args(&["estimate", "--scenario", path, "--trials", "4"]).is_ok());
        let err = run_args(&["estimate", "--scenario", path, "--trials", "5"]).unwrap_err();
        assert!(format!("{err:#}").contains("`trials`"), "{err:#}");
        let err = run_args(&["estimate", "--scenario", path, "2,2,2,2"]).unwrap_err();
        assert!(format!("{err:#}").contains("`config`"), "{err:#}");
        let err = run_args(&["table", "--scenario", path]).unwrap_err();
        assert!(format!("{err:#}").contains("does not apply"), "{err:#}");
        let f = scenario("kind = coop\n");
        assert!(run_args(&["table", "--scenario", f.path().to_str().unwrap()]).is_err());
    }

    #[test]
    fn missing_and_malformed_inputs() {
        assert!(run_args(&["bounds"]).is_err());
        assert!(run_args(&["bounds", "1,2,3"]).is_err());
        assert!(run_args(&["estimate", "2,3,2,3", "nonsense"]).is_err());
        assert!(run_args(&["coop", "4", "1", "--d-tr", "0"]).is_err());
        assert!(
            run_args(&["estimate", "2,3,2,3", "int-zf", "--snr-lo", "60", "--snr-hi", "40"])
                .is_err()
        );
        assert!(run_args(&["coop", "4", "1", "--plot", "x.gp"]).is_err());
    }

    #[test]
    fn genie_mismatch_names_the_condition() {
        let err = run_args(&["estimate", "3,1,3,1", "int-genie"]).unwrap_err();
        assert!(
            format!("{err:#}").contains("N1 >= M2 or N2 >= M1"),
            "{err:#}"
        );
        let err = run_args(&["estimate", "1,1,2,3", "int-genie-r1"]).unwrap_err();
        assert!(format!("{err:#}").contains("N1 >= M2"), "{err:#}");
    }

    #[test]
    fn estimate_csv_is_reproducible() {
        let args = [
            "estimate", "3,2,2,3", "int-zf", "--trials", "3", "--seed", "9",
        ];
        let a = body(&args);
        assert_eq!(a, body(&args));
        assert_ne!(
            a,
            body(&["estimate", "3,2,2,3", "int-zf", "--trials", "3", "--seed", "10"])
        );
        let lines: Vec<&str> = a.lines().collect();
        assert!(lines[0].starts_with("# mimo-dof"));
        assert_eq!(
            lines[1],
            "# trials=3 snr-lo=40 snr-hi=60 snr-step=5 window=40..60 gamma=2 seed=9"
        );
        assert_eq!(lines[2], crate::output::HEADER.join(","));
        assert_eq!(lines.len(), 3 + 5 + 1);
        assert!(lines[8].starts_with("estimate,\"3,2,2,3\",int-zf:slope,60,"));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn outputs_go_to_files() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("coop.csv");
        let gp = dir.path().join("coop.gp");
        let out = run_args(&[
            "coop",
            "2",
            "1",
            "--trials",
            "2",
            "--out",
            csv.to_str().unwrap(),
            "--plot",
            gp.to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(out.written_to.as_deref(), Some(csv.as_path()));
        assert_eq!(std::fs::read(&csv).unwrap(), out.body);
        let text = String::from_utf8(out.body).unwrap();
        assert!(text.contains("# trials=2 snr-lo=0 snr-hi=60"));
        assert!(text.contains(",transmit-only:slope,") && text.contains(",share-transmit:slope,"));
        assert!(std::fs::read_to_string(&gp)
            .unwrap()
            .contains(csv.to_str().unwrap()));
    }
}
