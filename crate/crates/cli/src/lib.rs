//! Command-line front end for the multi-innovation diffusion models.

pub mod commands;
pub mod error;
pub mod heatmap;
pub mod output;
pub mod presets;
pub mod settings;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::SliceAt;
use crate::error::{CliError, CliResult};
use crate::heatmap::HeatAxis;
use crate::presets::PresetOptions;
use crate::settings::ParamArgs;

#[derive(Debug, Parser)]
#[command(name = "multidiff", version, about = "Diffusion of two compatible innovations on networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    /// x axis is a/b with b held fixed
    Ratio,
    /// x axis is beta
    Beta,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a network and write its edge list and degree counts.
    Generate(ParamArgs),
    /// Monte Carlo ensemble of the best-response dynamics.
    Simulate(ParamArgs),
    /// Approximate master equation trajectory.
    Ame {
        #[command(flatten)]
        params: ParamArgs,
        /// Also write the full per-class state at every sample time.
        #[arg(long)]
        dump: bool,
    },
    /// Degree-based mean-field trajectory.
    Mf(ParamArgs),
    /// Mean-field phase field on the (rho01, rho10) plane.
    Phase {
        #[command(flatten)]
        params: ParamArgs,
        /// Fixed rho11 value of the slice.
        #[arg(long, conflicts_with = "at")]
        slice: Option<f64>,
        /// Take rho11 from the regular mean-field path at this time.
        #[arg(long)]
        at: Option<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = multidiff_core::mf::DEFAULT_GRID)]
        grid: usize,
    },
    /// Dominant strategy over a parameter grid, from the AME at time T.
    Heatmap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = AxisArg::Ratio)]
        axis: AxisArg,
        /// Comma list `v1,v2,...` or range `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        xs: String,
        /// Comma list or range of mean degrees.
        #[arg(long)]
        zs: String,
    },
    /// p-dominance thresholds and risk dominance of the coordination game.
    Pdom(ParamArgs),
    /// Run one named experiment preset.
    Reproduce {
        /// One of fig3..fig11 or aer.
        preset: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "net-file")]
        net_file: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

/// Parses `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let num =
        |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("'{t}' is not a number in '{text}'")));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(CliError::Usage(format!("range '{text}' must be start:stop:step")));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(CliError::Usage(format!("range '{text}' needs step > 0 and stop >= start")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    text.split(',').filter(|t| !t.trim().is_empty()).map(num).collect()
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(p) => commands::generate(&p.resolve()?),
        Command::Simulate(p) => commands::simulate(&p.resolve()?),
        Command::Ame { params, dump } => commands::ame(&params.resolve()?, dump),
        Command::Mf(p) => commands::mf(&p.resolve()?),
        Command::Phase { params, slice, at, grid } => {
            let s = params.resolve()?;
            let at = match (slice, at) {
                (Some(v), _) => SliceAt::Value(v),
                (None, Some(t)) => SliceAt::Time(t),
                (None, None) => SliceAt::Value(s.seeds[3]),
            };
            commands::phase(&s, at, grid)
        }
        Command::Heatmap { params, axis, xs, zs } => {
            let axis = match axis {
                AxisArg::Ratio => HeatAxis::Ratio,
                AxisArg::Beta => HeatAxis::Beta,
            };
            commands::heatmap(&params.resolve()?, axis, parse_values(&xs)?, parse_values(&zs)?)
        }
        Command::Pdom(p) => commands::pdom(&p.resolve()?),
        Command::Reproduce { preset, out, seed, runs, n, net_file, grid } => {
            let opts = PresetOptions { out, seed, runs, n, net_file, grid };
            let written = presets::reproduce(&preset, opts)?;
            for f in written {
                println!("{f}");
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!(parse_values("1,2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        let r = parse_values("0.8:2.0:0.1").unwrap();
        assert_eq!(r.len(), 13);
        assert!((r[12] - 2.0).abs() < 1e-12);
        assert!(matches!(parse_values("1:0:1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_values("x"), Err(CliError::Usage(_))));
    }

    #[test]
    fn cli_parses_negative_delta() {
        let cli = Cli::try_parse_from(["multidiff", "pdom", "--delta", "-2"]).unwrap();
        assert!(matches!(cli.command, Command::Pdom(ref p) if p.delta == Some(-2.0)));
    }
}
