//! Named experiment presets (`fig3`..`fig11`, `aer`) with fixed parameter
//! grids and sample times.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use multidiff_core::ame::{init_ame, AmeSystem};
use multidiff_core::games::{CoordinationParams, UtilityParams};
use multidiff_core::mf::{phase_field, MfState, MfSystem};
use multidiff_core::net::{empirical_degree_distribution, load_network, truncated_poisson, DEFAULT_COVERAGE};
use multidiff_core::sim::{
    run_ensemble, run_ensemble_members, symmetry_sweep, EnsembleSummary, NetworkSpec, SimConfig, SweepParam, SweepTable,
};
use multidiff_core::trajectory::{csv_with_header, uniform_times};
use multidiff_core::{DegreeDistribution, Model, Strategy, Trajectory};
use serde_json::Value;

use crate::commands::{guides, histogram_plot, regular_mf_path, write_runs_csv};
use crate::error::{CliError, CliResult};
use crate::heatmap::{heatmap_dominant, HeatAxis, HeatmapSpec};
use crate::output::Outputs;
use crate::svg::{phase_quiver, LinePlot, Series, STRATEGY_COLORS};

pub const PRESETS: [&str; 10] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "aer"];

#[derive(Clone, Debug)]
pub struct PresetOptions {
    pub out: PathBuf,
    pub seed: u64,
    /// Overrides every ensemble size of the preset.
    pub runs: Option<usize>,
    /// Overrides the network size of synthetic networks.
    pub n: Option<usize>,
    pub net_file: Option<PathBuf>,
    /// Phase-field resolution.
    pub grid: Option<usize>,
}

impl PresetOptions {
    pub fn new(out: impl Into<PathBuf>, seed: u64) -> Self {
        PresetOptions { out: out.into(), seed, runs: None, n: None, net_file: None, grid: None }
    }
}

struct Ctx {
    name: &'static str,
    opts: PresetOptions,
    out: Outputs,
    params: BTreeMap<String, Value>,
    network: String,
}

fn coord(a: f64, b: f64, delta: f64) -> CliResult<Model> {
    Ok(Model::Coordination(CoordinationParams::new(a, b, 1.0, delta)?))
}

fn util(alpha_a: f64, alpha_b: f64, beta: f64) -> CliResult<Model> {
    Ok(Model::Utility(UtilityParams::new(alpha_a, alpha_b, 0.2, beta)?))
}

fn seeds(r: f64) -> [f64; 4] {
    [1.0 - 2.0 * r, r, r, 0.0]
}

fn tag(v: f64) -> String {
    v.to_string().replace('-', "m")
}

impl Ctx {
    fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.to_string(), v.into());
    }

    fn runs(&self, default: usize) -> usize {
        self.opts.runs.unwrap_or(default)
    }

    fn n(&self, default: usize) -> usize {
        self.opts.n.unwrap_or(default)
    }

    fn header(&self, model: Option<&Model>, extra: &[(&str, String)]) -> Vec<String> {
        let mut h = vec![format!("preset={}", self.name)];
        if let Some(m) = model {
            h.push(format!("model={}", m.name()));
            h.extend(m.param_pairs().into_iter().map(|(k, v)| format!("{k}={v}")));
        }
        h.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
        h.push(format!("seed={}", self.opts.seed));
        h
    }

    fn svg(&mut self, name: &str, content: String) -> CliResult<()> {
        self.out.text(name, &content)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(e.into())
}

/// Runs `preset` and writes its outputs plus `manifest.json` into `opts.out`.
pub fn reproduce(preset: &str, opts: PresetOptions) -> CliResult<Vec<String>> {
    let name = PRESETS
        .iter()
        .copied()
        .find(|p| *p == preset)
        .ok_or_else(|| CliError::Usage(format!("unknown preset '{preset}'; available: {}", PRESETS.join(", "))))?;
    if name == "aer" && opts.net_file.is_none() {
        return Err(CliError::Usage("preset aer needs --net-file with the acknowledgment edge list".into()));
    }
    let out = Outputs::new(&opts.out)?;
    let mut ctx = Ctx { name, opts, out, params: BTreeMap::new(), network: String::new() };
    match name {
        "fig3" => fig3(&mut ctx)?,
        "fig4" => coordination_phase(&mut ctx, 0.0)?,
        "fig5" => coordination_phase(&mut ctx, -2.0)?,
        "fig6" => paths_vs_delta(&mut ctx, 4.0)?,
        "fig7" => fig7(&mut ctx)?,
        "fig8" => paths_vs_delta(&mut ctx, 6.0)?,
        "fig9" => fig9(&mut ctx)?,
        "fig10" => fig10(&mut ctx)?,
        "fig11" => utility_vs_z(&mut ctx, 0.3, &[0.0, 0.1, -1.0])?,
        "aer" => aer(&mut ctx)?,
        _ => unreachable!(),
    }
    let Ctx { mut out, params, network, opts, .. } = ctx;
    out.manifest(&format!("reproduce {name}"), &params, &network, opts.seed)?;
    Ok(out.written().to_vec())
}

fn fig3(ctx: &mut Ctx) -> CliResult<()> {
    let xs: Vec<f64> = (8..=20).map(|i| i as f64 / 10.0).collect();
    let zs: Vec<f64> = (2..=20).map(|i| i as f64 / 2.0).collect();
    let horizon = 50.0;
    ctx.param("b", 4.0);
    ctx.param("c", 1.0);
    ctx.param("rho0_01", 0.01);
    ctx.param("rho0_10", 0.01);
    ctx.param("T", horizon);
    ctx.param("a_over_b", "0.8..2.0 step 0.1");
    ctx.param("z", "1..10 step 0.5");
    ctx.param("delta", Value::from(vec![0.0, 2.0, -2.0]));
    ctx.network = "er(poisson degree distribution)".into();
    let mut failed = 0;
    for delta in [0.0, 2.0, -2.0] {
        let model = coord(4.0, 4.0, delta)?;
        let spec =
            HeatmapSpec { axis: HeatAxis::Ratio, xs: xs.clone(), zs: zs.clone(), model, seeds: seeds(0.01), horizon };
        let map = heatmap_dominant(&spec)?;
        failed += map.errors();
        let header = ctx.header(Some(&model), &[("T", horizon.to_string())]);
        let name = format!("fig3_delta{}", tag(delta));
        map.write_csv(ctx.out.create(&format!("{name}.csv"))?, &header)?;
        ctx.svg(&format!("{name}.svg"), map.grid(&format!("delta = {delta}")).render(&header))?;
    }
    if failed > 0 {
        return Err(CliError::Partial(format!("{failed} heatmap cells failed")));
    }
    Ok(())
}

fn coordination_phase(ctx: &mut Ctx, delta: f64) -> CliResult<()> {
    let model = coord(4.0, 4.0, delta)?;
    let z = 4;
    let init = seeds(0.01);
    let resolution = ctx.opts.grid.unwrap_or(multidiff_core::mf::DEFAULT_GRID);
    ctx.param("a", 4.0);
    ctx.param("b", 4.0);
    ctx.param("c", 1.0);
    ctx.param("delta", delta);
    ctx.param("rho0_01", 0.01);
    ctx.param("rho0_10", 0.01);
    ctx.param("grid", resolution as u64);
    ctx.param("panel_times", Value::from(vec![0.0, 5.0, 20.0]));
    ctx.network = format!("regular(z={z}) mean field");
    let path = regular_mf_path(&model, z, init, 50.0, 0.1)?;
    let header = ctx.header(Some(&model), &[("z", z.to_string())]);
    let fig = ctx.name;
    {
        let mut w = csv_with_header(ctx.out.create(&format!("{fig}_mf.csv"))?, &header)?;
        w.write_record(["t", "rho00", "rho01", "rho10", "rho11"]).map_err(csv_err)?;
        for (t, r) in &path {
            w.write_record([t.to_string(), r[0].to_string(), r[1].to_string(), r[2].to_string(), r[3].to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    for t in [0.0, 5.0, 20.0] {
        phase_panel(ctx, &model, z, &path, t, resolution, &header)?;
    }
    Ok(())
}

fn phase_panel(
    ctx: &mut Ctx,
    model: &Model,
    z: usize,
    path: &[(f64, [f64; 4])],
    t: f64,
    resolution: usize,
    header: &[String],
) -> CliResult<()> {
    let upto: Vec<(f64, [f64; 4])> = path.iter().copied().filter(|p| p.0 <= t + 1e-9).collect();
    let slice = upto.last().map_or(0.0, |p| p.1[3]);
    let field = phase_field(model, z, slice, resolution)?;
    let mut header = header.to_vec();
    header.push(format!("t={t}"));
    header.push(format!("rho11_slice={slice}"));
    let name = format!("{}_phase_t{}", ctx.name, tag(t));
    field.write_csv(ctx.out.create(&format!("{name}.csv"))?, &header)?;
    let xy: Vec<(f64, f64)> = upto.iter().map(|p| (p.1[1], p.1[2])).collect();
    ctx.svg(&format!("{name}.svg"), phase_quiver(&field, &format!("t = {t}, rho11 = {slice:.4}"), &xy, &header))
}

/// AME, MF and simulation paths side by side.
struct Comparison {
    ame: Trajectory,
    mf: Trajectory,
    sim: EnsembleSummary,
}

fn compare(
    model: Model,
    dd: &DegreeDistribution,
    spec: &NetworkSpec,
    init: [f64; 4],
    runs: usize,
    horizon: f64,
    seed: u64,
) -> CliResult<Comparison> {
    let times = uniform_times(horizon, 1.0);
    let ame = AmeSystem::new(dd, model).solve(&init_ame(dd, init)?, horizon, &times)?;
    let mf = MfSystem::new(dd, model).solve(&MfState::init(dd, init)?, horizon, &times)?;
    let cfg = SimConfig::new(model, init, horizon, times, seed);
    let sim = run_ensemble(spec, &cfg, runs)?;
    Ok(Comparison { ame, mf, sim })
}

fn write_comparison(
    ctx: &mut Ctx,
    name: &str,
    title: &str,
    model: &Model,
    c: &Comparison,
    header: &[String],
) -> CliResult<()> {
    {
        let mut w = csv_with_header(ctx.out.create(&format!("{name}.csv"))?, header)?;
        let mut cols = vec!["t".to_string()];
        for prefix in ["ame", "mf", "mean", "std"] {
            cols.extend(Strategy::ALL.iter().map(|s| format!("{prefix}{s}")));
        }
        w.write_record(&cols).map_err(csv_err)?;
        for (i, t) in c.ame.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            for v in [&c.ame.shares[i], &c.mf.shares[i], &c.sim.mean[i], &c.sim.std[i]] {
                row.extend(v.iter().map(f64::to_string));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let mut plot = LinePlot::new(title, "t", "share");
    for s in Strategy::ALL {
        let i = s.index();
        let color = STRATEGY_COLORS[i];
        plot.series.push(Series::line(
            format!("AME {s}"),
            c.ame.times.clone(),
            c.ame.shares.iter().map(|v| v[i]).collect(),
            color,
        ));
        plot.series.push(
            Series::line(format!("MF {s}"), c.mf.times.clone(), c.mf.shares.iter().map(|v| v[i]).collect(), color)
                .dashed(),
        );
        plot.series.push(
            Series::line(format!("sim {s}"), c.sim.times.clone(), c.sim.mean.iter().map(|v| v[i]).collect(), color)
                .points(Some(c.sim.std.iter().map(|v| v[i]).collect())),
        );
    }
    plot.guides = guides(model);
    plot.y_range = Some((0.0, 1.0));
    ctx.svg(&format!("{name}.svg"), plot.render(header))
}

fn paths_vs_delta(ctx: &mut Ctx, a: f64) -> CliResult<()> {
    let (z, n, runs, horizon) = (2.5, ctx.n(3000), ctx.runs(100), 50.0);
    ctx.param("a", a);
    ctx.param("b", 4.0);
    ctx.param("c", 1.0);
    ctx.param("delta", Value::from(vec![-2.0, 0.0, 2.0]));
    ctx.param("rho0_01", 0.02);
    ctx.param("rho0_10", 0.02);
    ctx.param("runs", runs as u64);
    ctx.param("T", horizon);
    ctx.network = format!("er(N={n}, z={z})");
    let dd = truncated_poisson(z, DEFAULT_COVERAGE)?;
    let spec = NetworkSpec::ErdosRenyi { n, z };
    for delta in [-2.0, 0.0, 2.0] {
        let model = coord(a, 4.0, delta)?;
        let c = compare(model, &dd, &spec, seeds(0.02), runs, horizon, ctx.opts.seed)?;
        let header = ctx.header(Some(&model), &[("network", spec.describe()), ("runs", runs.to_string())]);
        write_comparison(
            ctx,
            &format!("{}_delta{}", ctx.name, tag(delta)),
            &format!("delta = {delta}"),
            &model,
            &c,
            &header,
        )?;
    }
    Ok(())
}

fn write_sweep(
    ctx: &mut Ctx,
    name: &str,
    param: SweepParam,
    tables: &[(&str, SweepTable)],
    header: &[String],
) -> CliResult<()> {
    {
        let mut w = csv_with_header(ctx.out.create(&format!("{name}.csv"))?, header)?;
        let mut cols = vec![param.name().to_string()];
        for (label, _) in tables {
            cols.push(format!("std_{label}"));
            cols.push(format!("se_{label}"));
        }
        w.write_record(&cols).map_err(csv_err)?;
        for (i, (v, _)) in tables[0].1.rows.iter().enumerate() {
            let mut row = vec![v.to_string()];
            for (_, t) in tables {
                row.push(t.rows[i].1.std_delta.to_string());
                row.push(t.rows[i].1.std_delta_error().to_string());
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let mut plot = LinePlot::new(format!("std of rho01(T) - rho10(T) vs {}", param.name()), param.name(), "std");
    for (k, (label, t)) in tables.iter().enumerate() {
        let xs = t.rows.iter().map(|r| r.0).collect();
        let ys = t.rows.iter().map(|r| r.1.std_delta).collect();
        let err = t.rows.iter().map(|r| r.1.std_delta_error()).collect();
        plot.series.push(Series::line(*label, xs, ys, STRATEGY_COLORS[k + 2]).points(Some(err)));
    }
    plot.y_range = Some((0.0, 1.0));
    ctx.svg(&format!("{name}.svg"), plot.render(header))
}

fn fig7(ctx: &mut Ctx) -> CliResult<()> {
    let (z, n, horizon) = (4.0, ctx.n(3000), 100.0);
    let (hist_runs, sweep_runs) = (ctx.runs(500), ctx.runs(100));
    let deltas = [-2.0, -1.0, 0.0, 1.0, 2.0];
    ctx.param("a", 4.0);
    ctx.param("b", 4.0);
    ctx.param("c", 1.0);
    ctx.param("rho0_01", 0.01);
    ctx.param("rho0_10", 0.01);
    ctx.param("T", horizon);
    ctx.param("histogram_runs", hist_runs as u64);
    ctx.param("sweep_runs", sweep_runs as u64);
    ctx.param("sweep_delta", Value::from(deltas.to_vec()));
    ctx.network = format!("er(N={n}, z={z}); regular(N={n}, z=4)");
    let er = NetworkSpec::ErdosRenyi { n, z };
    for delta in [2.0, -2.0] {
        let model = coord(4.0, 4.0, delta)?;
        let cfg = SimConfig::new(model, seeds(0.01), horizon, vec![0.0, horizon], ctx.opts.seed);
        let runs = run_ensemble_members(&er, &cfg, hist_runs)?;
        let summary = EnsembleSummary::from_runs(&runs);
        let header = ctx.header(Some(&model), &[("network", er.describe()), ("runs", hist_runs.to_string())]);
        let name = format!("fig7_hist_delta{}", tag(delta));
        summary.write_histogram_csv(ctx.out.create(&format!("{name}.csv"))?, &header)?;
        write_runs_csv(ctx.out.create(&format!("fig7_runs_delta{}.csv", tag(delta)))?, &header, &runs)?;
        ctx.svg(&format!("{name}.svg"), histogram_plot(&format!("delta = {delta}"), &summary).render(&header))?;
    }
    let base = coord(4.0, 4.0, 0.0)?;
    let cfg = SimConfig::new(base, seeds(0.01), horizon, vec![0.0, horizon], ctx.opts.seed);
    let regular = NetworkSpec::Regular { n, z: 4 };
    let t_er = symmetry_sweep(&er, &cfg, SweepParam::Delta, &deltas, sweep_runs)?;
    let t_reg = symmetry_sweep(&regular, &cfg, SweepParam::Delta, &deltas, sweep_runs)?;
    let header = ctx.header(None, &[("model", "coordination".into()), ("runs", sweep_runs.to_string())]);
    write_sweep(ctx, "fig7_std", SweepParam::Delta, &[("er", t_er), ("regular", t_reg)], &header)
}

fn fig9(ctx: &mut Ctx) -> CliResult<()> {
    let z = 4;
    let resolution = ctx.opts.grid.unwrap_or(multidiff_core::mf::DEFAULT_GRID);
    let betas = [0.0, -0.5, -1.0];
    ctx.param("alphaA", 0.4);
    ctx.param("alphaB", 0.4);
    ctx.param("gamma", 0.2);
    ctx.param("beta", Value::from(betas.to_vec()));
    ctx.param("rho0_01", 0.02);
    ctx.param("rho0_10", 0.02);
    ctx.param("t", 1.0);
    ctx.param("grid", resolution as u64);
    ctx.network = format!("regular(z={z}) mean field; AME steady state at T=50");
    let dd = DegreeDistribution::point_mass(z);
    let mut steady = Vec::new();
    for beta in betas {
        let model = util(0.4, 0.4, beta)?;
        let path = regular_mf_path(&model, z, seeds(0.02), 1.0, 0.01)?;
        let header = ctx.header(Some(&model), &[("z", z.to_string())]);
        phase_panel(ctx, &model, z, &path, 1.0, resolution, &header)?;
        let ame = AmeSystem::new(&dd, model).solve(&init_ame(&dd, seeds(0.02))?, 50.0, &[50.0])?;
        steady.push((beta, *ame.last().unwrap()));
    }
    let header = ctx.header(None, &[("model", "utility".into()), ("z", z.to_string()), ("T", "50".into())]);
    let mut w = csv_with_header(ctx.out.create("fig9_ame_steady.csv")?, &header)?;
    w.write_record(["beta", "rho00", "rho01", "rho10", "rho11"]).map_err(csv_err)?;
    for (b, r) in steady {
        w.write_record([b.to_string(), r[0].to_string(), r[1].to_string(), r[2].to_string(), r[3].to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn steady_vs_z(ctx: &mut Ctx, model: Model, zs: &[f64], runs: usize, n: usize, name: &str) -> CliResult<()> {
    let horizon = 50.0;
    let init = seeds(0.02);
    let mut rows = Vec::new();
    for &z in zs {
        let dd = truncated_poisson(z, DEFAULT_COVERAGE)?;
        let ame = AmeSystem::new(&dd, model).solve(&init_ame(&dd, init)?, horizon, &[horizon])?;
        let cfg = SimConfig::new(model, init, horizon, vec![0.0, horizon], ctx.opts.seed);
        let sim = run_ensemble(&NetworkSpec::ErdosRenyi { n, z }, &cfg, runs)?;
        rows.push((z, *ame.last().unwrap(), *sim.mean.last().unwrap(), *sim.std.last().unwrap()));
    }
    let header =
        ctx.header(Some(&model), &[("N", n.to_string()), ("runs", runs.to_string()), ("T", horizon.to_string())]);
    {
        let mut w = csv_with_header(ctx.out.create(&format!("{name}.csv"))?, &header)?;
        let mut cols = vec!["z".to_string()];
        for prefix in ["ame", "mean", "std"] {
            cols.extend(Strategy::ALL.iter().map(|s| format!("{prefix}{s}")));
        }
        w.write_record(&cols).map_err(csv_err)?;
        for (z, a, m, s) in &rows {
            let mut row = vec![z.to_string()];
            for v in [a, m, s] {
                row.extend(v.iter().map(f64::to_string));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let mut plot = LinePlot::new(format!("steady state vs z ({})", name), "z", "share");
    for s in Strategy::ALL {
        let i = s.index();
        let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        plot.series.push(Series::line(
            format!("AME {s}"),
            xs.clone(),
            rows.iter().map(|r| r.1[i]).collect(),
            STRATEGY_COLORS[i],
        ));
        plot.series.push(
            Series::line(format!("sim {s}"), xs, rows.iter().map(|r| r.2[i]).collect(), STRATEGY_COLORS[i])
                .points(Some(rows.iter().map(|r| r.3[i]).collect())),
        );
    }
    plot.y_range = Some((0.0, 1.0));
    ctx.svg(&format!("{name}.svg"), plot.render(&header))
}

fn utility_vs_z(ctx: &mut Ctx, alpha_b: f64, betas: &[f64]) -> CliResult<()> {
    let zs: Vec<f64> = (2..=16).map(|i| i as f64 / 2.0).collect();
    let (runs, n) = (ctx.runs(100), ctx.n(3000));
    ctx.param("alphaA", 0.4);
    ctx.param("alphaB", alpha_b);
    ctx.param("gamma", 0.2);
    ctx.param("beta", Value::from(betas.to_vec()));
    ctx.param("rho0_01", 0.02);
    ctx.param("rho0_10", 0.02);
    ctx.param("z", "1..8 step 0.5");
    ctx.param("runs", runs as u64);
    ctx.param("T", 50.0);
    ctx.network = format!("er(N={n}, z varies)");
    for &beta in betas {
        let model = util(0.4, alpha_b, beta)?;
        let name = format!("{}_beta{}", ctx.name, tag(beta));
        steady_vs_z(ctx, model, &zs, runs, n, &name)?;
    }
    Ok(())
}

fn fig10(ctx: &mut Ctx) -> CliResult<()> {
    utility_vs_z(ctx, 0.4, &[0.0, -0.5, -1.0])?;
    let (runs, n) = (ctx.runs(100), ctx.n(3000));
    let betas = [-1.0, -0.5, 0.0, 0.1];
    ctx.param("sweep_beta", Value::from(betas.to_vec()));
    ctx.param("sweep_T", 100.0);
    let model = util(0.4, 0.4, 0.0)?;
    let cfg = SimConfig::new(model, seeds(0.02), 100.0, vec![0.0, 100.0], ctx.opts.seed);
    let t = symmetry_sweep(&NetworkSpec::ErdosRenyi { n, z: 4.0 }, &cfg, SweepParam::Beta, &betas, runs)?;
    let header = ctx.header(
        None,
        &[("model", "utility".into()), ("N", n.to_string()), ("z", "4".into()), ("runs", runs.to_string())],
    );
    write_sweep(ctx, "fig10_std", SweepParam::Beta, &[("er", t)], &header)
}

fn aer(ctx: &mut Ctx) -> CliResult<()> {
    let path = ctx.opts.net_file.clone().expect("checked by caller");
    let net = Arc::new(load_network(&path)?);
    let dd = empirical_degree_distribution(&net);
    let runs = ctx.runs(1000);
    ctx.param("rho0_01", 0.1);
    ctx.param("rho0_10", 0.1);
    ctx.param("runs", runs as u64);
    ctx.param("T", 50.0);
    ctx.param("coordination", "a=6 b=4 c=1 delta=0");
    ctx.param("utility", "alphaA=0.4 alphaB=0.3 gamma=0.2 beta=0");
    ctx.network = format!(
        "file({}) N={} mean_degree={} max_degree={}",
        path.display(),
        net.n_nodes(),
        net.mean_degree(),
        net.max_degree()
    );
    let spec = NetworkSpec::Fixed(net);
    for (label, model) in [("coordination", coord(6.0, 4.0, 0.0)?), ("utility", util(0.4, 0.3, 0.0)?)] {
        let c = compare(model, &dd, &spec, seeds(0.1), runs, 50.0, ctx.opts.seed)?;
        let network = ctx.network.clone();
        let header = ctx.header(Some(&model), &[("network", network), ("runs", runs.to_string())]);
        write_comparison(ctx, &format!("aer_{label}"), label, &model, &c, &header)?;
    }
    let mut w = ctx.out.create("aer_degrees.csv")?;
    let header = ctx.header(None, &[("network", ctx.network.clone())]);
    dd.write_csv(&mut w, &header)?;
    w.flush()?;
    Ok(())
}
