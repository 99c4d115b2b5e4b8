//! Subcommand implementations. Each writes its files through [`Outputs`]
//! and finishes with a manifest.

use std::io::Write;

use multidiff_core::ame::{init_ame, write_state_csv, AmeSystem};
use multidiff_core::games::{p_dominance_thresholds, risk_dominant, PDominance};
use multidiff_core::mf::{phase_field, MfState, MfSystem, RegularMf};
use multidiff_core::net::{empirical_degree_distribution, truncated_poisson, DEFAULT_COVERAGE};
use multidiff_core::ode::Integrator;
use multidiff_core::sim::{run_ensemble_members, stream_rng, EnsembleSummary, SimConfig, SimResult};
use multidiff_core::trajectory::{csv_with_header, uniform_times};
use multidiff_core::{DegreeDistribution, Model, Strategy, Trajectory};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::heatmap::{heatmap_dominant, HeatAxis, HeatmapSpec};
use crate::output::{params_from_header, Outputs};
use crate::settings::{NetworkChoice, Settings};
use crate::svg::{phase_quiver, Guide, LinePlot, Series, STRATEGY_COLORS};

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(e.into())
}

/// Degree distribution matching the network choice.
pub fn degree_distribution(s: &Settings) -> CliResult<DegreeDistribution> {
    Ok(match &s.network {
        NetworkChoice::Er => truncated_poisson(s.z, DEFAULT_COVERAGE)?,
        NetworkChoice::Regular => DegreeDistribution::point_mass(s.regular_degree()?),
        NetworkChoice::File(p) => empirical_degree_distribution(&multidiff_core::net::load_network(p)?),
    })
}

/// p-dominance guide lines for coordination runs.
pub fn guides(model: &Model) -> Vec<Guide> {
    match model {
        Model::Coordination(p) => match p_dominance_thresholds(p) {
            Ok(pd) => vec![
                Guide { y: pd.p01, label: "p01".into(), dashed: true },
                Guide { y: pd.p10, label: "p10".into(), dashed: true },
                Guide { y: pd.p11, label: "p11".into(), dashed: false },
            ],
            Err(_) => Vec::new(),
        },
        Model::Utility(_) => Vec::new(),
    }
}

pub fn trajectory_plot(title: &str, tr: &Trajectory, model: &Model) -> LinePlot {
    let mut plot = LinePlot::new(title, "t", "share");
    for s in Strategy::ALL {
        let ys = tr.shares.iter().map(|v| v[s.index()]).collect();
        plot.series.push(Series::line(format!("rho{s}"), tr.times.clone(), ys, STRATEGY_COLORS[s.index()]));
    }
    plot.guides = guides(model);
    plot.y_range = Some((0.0, 1.0));
    plot
}

fn finish(out: &mut Outputs, command: &str, header: &[String], network: &str, seed: u64) -> CliResult<()> {
    out.manifest(command, &params_from_header(header), network, seed)
}

pub fn generate(s: &Settings) -> CliResult<()> {
    let header = s.header("generate");
    let net = match &s.network {
        NetworkChoice::File(_) => match s.network_spec()? {
            multidiff_core::sim::NetworkSpec::Fixed(n) => n.as_ref().clone(),
            _ => unreachable!(),
        },
        _ => s.network_spec()?.build(&mut stream_rng(s.seed, 0))?,
    };
    let mut out = Outputs::new(&s.out)?;
    let mut w = out.create("network.txt")?;
    for line in &header {
        writeln!(w, "# {line}")?;
    }
    net.write_edge_list(&mut w)?;
    empirical_degree_distribution(&net).write_csv(out.create("degrees.csv")?, &header)?;
    println!(
        "N={} M={} mean_degree={} max_degree={}",
        net.n_nodes(),
        net.n_edges(),
        net.mean_degree(),
        net.max_degree()
    );
    finish(&mut out, "generate", &header, &s.network_label(), s.seed)
}

pub fn ame(s: &Settings, dump: bool) -> CliResult<()> {
    let header = s.header("ame");
    let dd = degree_distribution(s)?;
    let sys = AmeSystem::new(&dd, s.model);
    let init = init_ame(&dd, s.seeds)?;
    let times = uniform_times(s.horizon, s.step);
    let dump_times: &[f64] = if dump { &times } else { &[] };
    let (tr, snaps) = sys.solve_with_snapshots(&init, s.horizon, &times, dump_times)?;
    let mut out = Outputs::new(&s.out)?;
    tr.write_csv(out.create("ame.csv")?, &header)?;
    out.text("ame.svg", &trajectory_plot("AME", &tr, &s.model).render(&header))?;
    if dump {
        write_state_csv(out.create("ame_state.csv")?, &header, &snaps)?;
    }
    print_final("ame", &tr);
    finish(&mut out, "ame", &header, &s.network_label(), s.seed)
}

pub fn mf(s: &Settings) -> CliResult<()> {
    let header = s.header("mf");
    let dd = degree_distribution(s)?;
    let tr = MfSystem::new(&dd, s.model).solve(
        &MfState::init(&dd, s.seeds)?,
        s.horizon,
        &uniform_times(s.horizon, s.step),
    )?;
    let mut out = Outputs::new(&s.out)?;
    tr.write_csv(out.create("mf.csv")?, &header)?;
    out.text("mf.svg", &trajectory_plot("MF", &tr, &s.model).render(&header))?;
    print_final("mf", &tr);
    finish(&mut out, "mf", &header, &s.network_label(), s.seed)
}

fn print_final(name: &str, tr: &Trajectory) {
    if let (Some(t), Some(r)) = (tr.times.last(), tr.last()) {
        println!("{name} t={t} rho00={} rho01={} rho10={} rho11={}", r[0], r[1], r[2], r[3]);
    }
}

pub fn simulation_config(s: &Settings) -> SimConfig {
    let mut cfg = SimConfig::new(s.model, s.seeds, s.horizon, uniform_times(s.horizon, s.step), s.seed);
    cfg.dt = s.dt;
    cfg
}

pub fn write_runs_csv<W: Write>(out: W, header: &[String], runs: &[SimResult]) -> CliResult<()> {
    let mut w = csv_with_header(out, header)?;
    w.write_record(["run", "converged", "steps", "rho00", "rho01", "rho10", "rho11", "delta"]).map_err(csv_err)?;
    for (i, r) in runs.iter().enumerate() {
        let f = r.final_shares();
        let mut row = vec![i.to_string(), r.converged.to_string(), r.steps.to_string()];
        row.extend(f.iter().map(f64::to_string));
        row.push((f[1] - f[2]).to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn ensemble_plot(title: &str, summary: &EnsembleSummary, model: &Model) -> LinePlot {
    let mut plot = LinePlot::new(title, "t", "share");
    for s in Strategy::ALL {
        let i = s.index();
        plot.series.push(
            Series::line(
                format!("rho{s}"),
                summary.times.clone(),
                summary.mean.iter().map(|m| m[i]).collect(),
                STRATEGY_COLORS[i],
            )
            .points(Some(summary.std.iter().map(|v| v[i]).collect())),
        );
    }
    plot.guides = guides(model);
    plot.y_range = Some((0.0, 1.0));
    plot
}

pub fn histogram_plot(title: &str, summary: &EnsembleSummary) -> LinePlot {
    let mut plot = LinePlot::new(title, "rho01(T) - rho10(T)", "runs");
    let xs: Vec<f64> = (0..summary.histogram.len()).map(EnsembleSummary::bin_center).collect();
    let ys = summary.histogram.iter().map(|&c| c as f64).collect();
    plot.series.push(Series::line("count", xs, ys, STRATEGY_COLORS[1]).points(None));
    plot
}

pub fn simulate(s: &Settings) -> CliResult<()> {
    let header = s.header("simulate");
    let spec = s.network_spec()?;
    let runs = run_ensemble_members(&spec, &simulation_config(s), s.runs)?;
    let summary = EnsembleSummary::from_runs(&runs);
    let mut out = Outputs::new(&s.out)?;
    summary.write_csv(out.create("sim.csv")?, &header)?;
    summary.write_histogram_csv(out.create("sim_delta_hist.csv")?, &header)?;
    write_runs_csv(out.create("sim_runs.csv")?, &header, &runs)?;
    out.text("sim.svg", &ensemble_plot("simulation mean and std", &summary, &s.model).render(&header))?;
    out.text("sim_delta_hist.svg", &histogram_plot("terminal rho01 - rho10", &summary).render(&header))?;
    let m = summary.mean.last().copied().unwrap_or_default();
    println!(
        "runs={} converged={} mean_final={:?} std_delta={} mean_delta={}",
        summary.n_runs(),
        summary.converged_runs,
        m,
        summary.std_delta,
        summary.mean_delta
    );
    finish(&mut out, "simulate", &header, &spec.describe(), s.seed)
}

/// Where to cut the `rho11` slice of a phase field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SliceAt {
    Value(f64),
    /// `rho11(t)` of the regular-graph mean-field path from the seeds.
    Time(f64),
}

/// Regular-graph mean-field path `(t, shares)` sampled every `step`.
pub fn regular_mf_path(
    model: &Model,
    z: usize,
    seeds: [f64; 4],
    horizon: f64,
    step: f64,
) -> CliResult<Vec<(f64, [f64; 4])>> {
    let mut y = seeds.to_vec();
    let mut path = Vec::new();
    if horizon == 0.0 {
        return Ok(vec![(0.0, seeds)]);
    }
    Integrator::default().integrate(
        &RegularMf::new(z, model),
        0.0,
        &mut y,
        &uniform_times(horizon, step),
        |t, y| path.push((t, [y[0], y[1], y[2], y[3]])),
    )?;
    Ok(path)
}

pub fn write_phase<F: FnMut(&str) -> CliResult<Box<dyn Write>>>(
    s: &Settings,
    at: SliceAt,
    resolution: usize,
    header: &[String],
    name: &str,
    mut create: F,
) -> CliResult<f64> {
    let z = s.regular_degree()?;
    let (slice, path) = match at {
        SliceAt::Value(v) => (v, Vec::new()),
        SliceAt::Time(t) => {
            let path = regular_mf_path(&s.model, z, s.seeds, t, (t / 100.0).max(1e-3))?;
            (path.last().map_or(s.seeds[3], |p| p.1[3]), path)
        }
    };
    let field = phase_field(&s.model, z, slice, resolution)?;
    let mut header = header.to_vec();
    header.push(format!("rho11_slice={slice}"));
    field.write_csv(create(&format!("{name}.csv"))?, &header)?;
    let xy: Vec<(f64, f64)> = path.iter().map(|p| (p.1[1], p.1[2])).collect();
    let svg = phase_quiver(&field, &format!("rho11 = {slice:.4}"), &xy, &header);
    create(&format!("{name}.svg"))?.write_all(svg.as_bytes())?;
    Ok(slice)
}

pub fn phase(s: &Settings, at: SliceAt, resolution: usize) -> CliResult<()> {
    let header = s.header("phase");
    let mut out = Outputs::new(&s.out)?;
    let slice = write_phase(s, at, resolution, &header, "phase", |name| Ok(Box::new(out.create(name)?)))?;
    println!("rho11 slice = {slice}");
    finish(&mut out, "phase", &header, &format!("regular(z={})", s.z), s.seed)
}

pub fn heatmap(s: &Settings, axis: HeatAxis, xs: Vec<f64>, zs: Vec<f64>) -> CliResult<()> {
    let mut header = s.header("heatmap");
    header.push(format!("{}={}", axis.name(), join(&xs)));
    header.push(format!("zs={}", join(&zs)));
    let spec = HeatmapSpec { axis, xs, zs, model: s.model, seeds: s.seeds, horizon: s.horizon };
    let map = heatmap_dominant(&spec)?;
    let mut out = Outputs::new(&s.out)?;
    map.write_csv(out.create("heatmap.csv")?, &header)?;
    out.text("heatmap.svg", &map.grid("dominant strategy, shade = 1 - rho00(T)").render(&header))?;
    finish(&mut out, "heatmap", &header, "er(poisson)", s.seed)?;
    match map.errors() {
        0 => Ok(()),
        n => Err(CliError::Partial(format!("{n} heatmap cells failed; see the status column"))),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
pub struct PdomReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub risk_dominant: Option<String>,
}

pub fn pdom_report(model: &Model) -> CliResult<PdomReport> {
    let Model::Coordination(p) = model else {
        return Err(CliError::Usage("pdom applies to the coordination model".into()));
    };
    let PDominance { p00, p01, p10, p11 } = p_dominance_thresholds(p)?;
    let rd = risk_dominant(p)?.map(|s| format!("({s},{s})"));
    Ok(PdomReport { a: p.a, b: p.b, c: p.c, delta: p.delta, p00, p01, p10, p11, risk_dominant: rd })
}

pub fn pdom(s: &Settings) -> CliResult<()> {
    let r = pdom_report(&s.model)?;
    let json = serde_json::to_string_pretty(&r)?;
    let mut table = String::from("strategy  p_s\n");
    for (name, v) in [("00", r.p00), ("01", r.p01), ("10", r.p10), ("11", r.p11)] {
        table += &format!("{name:<8}  {v}\n");
    }
    table += &format!("risk-dominant: {}\n{json}\n", r.risk_dominant.as_deref().unwrap_or("none"));
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(table.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if s.out_given {
        let mut out = Outputs::new(&s.out)?;
        out.text("pdom.json", &(json + "\n"))?;
    }
    Ok(())
}
