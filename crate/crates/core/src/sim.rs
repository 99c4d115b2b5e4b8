//! Asynchronous best-response dynamics on explicit networks.
//!
//! Each time step of length `dt` draws `floor(dt * N)` distinct players and
//! updates them one after another against the live strategies of their
//! neighbors. Random streams are ChaCha8 seeded with the master seed and
//! the run index as stream id, so run `i` of an ensemble is reproducible on
//! its own and independent of thread scheduling.

use std::io::Write;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ame::validate_seed_fractions;
use crate::error::{Error, Result};
use crate::games::{Model, Strategy};
use crate::net::{generate_er, generate_regular, Network};
use crate::trajectory::{csv_with_header, validate_samples, Trajectory, TrajectoryMeta};

/// Random stream of run `run` under master seed `master`.
pub fn stream_rng(master: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run);
    rng
}

/// What an updating player does when several strategies are best responses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum TieRule {
    /// Draw uniformly from the best responses, the current strategy included.
    #[default]
    Uniform,
    /// Keep the current strategy whenever it is a best response.
    KeepCurrent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub max_time: f64,
    pub seed_fractions: [f64; 4],
    pub model: Model,
    pub rng_seed: u64,
    pub record_times: Vec<f64>,
    pub tie_rule: TieRule,
}

impl SimConfig {
    pub const DEFAULT_DT: f64 = 0.01;

    pub fn new(model: Model, seed_fractions: [f64; 4], max_time: f64, record_times: Vec<f64>, rng_seed: u64) -> Self {
        SimConfig {
            dt: Self::DEFAULT_DT,
            max_time,
            seed_fractions,
            model,
            rng_seed,
            record_times,
            tie_rule: TieRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt < 1.0) {
            return Err(Error::Parameter(format!("dt must lie in (0,1) (got {})", self.dt)));
        }
        validate_seed_fractions(&self.seed_fractions)?;
        validate_samples(&self.record_times, self.max_time)?;
        self.model.validate()
    }

    fn step_of(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub trajectory: Trajectory,
    pub final_state: Vec<Strategy>,
    pub converged: bool,
    pub steps: usize,
}

impl SimResult {
    pub fn final_shares(&self) -> [f64; 4] {
        let mut c = [0usize; 4];
        for s in &self.final_state {
            c[s.index()] += 1;
        }
        let n = self.final_state.len().max(1) as f64;
        c.map(|v| v as f64 / n)
    }
}

// floor that tolerates products like 0.29 * 100 = 28.999999999999996
fn seed_count(frac: f64, n: usize) -> usize {
    (frac * n as f64 + 1e-9).floor() as usize
}

/// Resets every node to `00`, then places `floor(rho0[s] * N)` seeds of
/// each active strategy on disjoint, uniformly chosen nodes.
pub fn seed_assign<R: Rng + ?Sized>(net: &mut Network, rho0: &[f64; 4], rng: &mut R) -> Result<()> {
    if rho0[1..].iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::Parameter(format!("seed fractions must be non-negative: {rho0:?}")));
    }
    let n = net.n_nodes();
    let counts = [seed_count(rho0[1], n), seed_count(rho0[2], n), seed_count(rho0[3], n)];
    let total: usize = counts.iter().sum();
    if total > n {
        return Err(Error::Parameter(format!("{total} seeds do not fit on {n} nodes")));
    }
    net.reset_strategies();
    let chosen = index::sample(rng, n, total);
    let mut it = chosen.iter();
    for (s, &c) in [Strategy::S01, Strategy::S10, Strategy::S11].into_iter().zip(&counts) {
        for node in it.by_ref().take(c) {
            net.strategies[node] = s;
        }
    }
    Ok(())
}

/// True when every player with at least one neighbor already plays a best response.
pub fn is_stable(net: &Network, model: &Model) -> bool {
    (0..net.n_nodes()).all(|i| net.degree(i) == 0 || model.best_response(&net.profile(i)).contains(net.strategies[i]))
}

/// Runs the dynamics on an already seeded network with the stream of `config.rng_seed`.
pub fn run_simulation(net: &mut Network, config: &SimConfig) -> Result<SimResult> {
    let mut rng = stream_rng(config.rng_seed, 0);
    run_simulation_with_rng(net, config, &mut rng, "network")
}

pub fn run_simulation_with_rng<R: Rng + ?Sized>(
    net: &mut Network,
    config: &SimConfig,
    rng: &mut R,
    network_label: &str,
) -> Result<SimResult> {
    config.validate()?;
    let n = net.n_nodes();
    let model = &config.model;
    let batch = ((config.dt * n as f64).floor() as usize).clamp(1, n.max(1));
    let total_steps = config.step_of(config.max_time);
    let audit_every = config.step_of(1.0).max(1);
    let record_steps: Vec<usize> = config.record_times.iter().map(|&t| config.step_of(t)).collect();

    let meta = TrajectoryMeta {
        solver: "sim".into(),
        model: *model,
        network: network_label.to_string(),
        seed_fractions: net.shares(),
    };
    let mut traj = Trajectory::new(meta);
    let mut counts = net.strategy_counts();
    let nf = n.max(1) as f64;
    let mut next_record = 0;
    let record = |step: usize, counts: &[usize; 4], traj: &mut Trajectory, next: &mut usize| {
        while *next < record_steps.len() && record_steps[*next] <= step {
            traj.push(config.record_times[*next], counts.map(|c| c as f64 / nf));
            *next += 1;
        }
    };

    let mut converged = is_stable(net, model);
    let mut step = 0;
    record(0, &counts, &mut traj, &mut next_record);
    while !converged && step < total_steps {
        step += 1;
        let players = index::sample(rng, n, batch);
        for i in players.iter() {
            if net.degree(i) == 0 {
                continue;
            }
            let br = model.best_response(&net.profile(i));
            let current = net.strategies[i];
            let next = match (br.len(), config.tie_rule) {
                (1, _) => br.nth(0),
                (_, TieRule::KeepCurrent) if br.contains(current) => current,
                (len, _) => br.nth(rng.random_range(0..len)),
            };
            if next == current {
                continue;
            }
            counts[current.index()] -= 1;
            counts[next.index()] += 1;
            net.strategies[i] = next;
        }
        record(step, &counts, &mut traj, &mut next_record);
        if step % audit_every == 0 {
            converged = is_stable(net, model);
        }
    }
    // a Nash state: later records repeat it
    record(usize::MAX, &counts, &mut traj, &mut next_record);
    Ok(SimResult { trajectory: traj, final_state: net.strategies.clone(), converged, steps: step })
}

/// How each ensemble member gets its network.
#[derive(Clone, Debug)]
pub enum NetworkSpec {
    ErdosRenyi {
        n: usize,
        z: f64,
    },
    Regular {
        n: usize,
        z: usize,
    },
    /// Reused as-is by every run.
    Fixed(Arc<Network>),
}

impl NetworkSpec {
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Network> {
        match self {
            NetworkSpec::ErdosRenyi { n, z } => generate_er(*n, *z, rng),
            NetworkSpec::Regular { n, z } => generate_regular(*n, *z, rng),
            NetworkSpec::Fixed(net) => Ok(net.as_ref().clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NetworkSpec::ErdosRenyi { n, z } => format!("er(N={n}, z={z})"),
            NetworkSpec::Regular { n, z } => format!("regular(N={n}, z={z})"),
            NetworkSpec::Fixed(net) => format!("file(N={}, M={})", net.n_nodes(), net.n_edges()),
        }
    }
}

/// One ensemble member: fresh network, fresh seeds, dynamics, all on stream `run`.
pub fn run_member(spec: &NetworkSpec, config: &SimConfig, run: u64) -> Result<SimResult> {
    let mut rng = stream_rng(config.rng_seed, run);
    let mut net = spec.build(&mut rng)?;
    seed_assign(&mut net, &config.seed_fractions, &mut rng)?;
    run_simulation_with_rng(&mut net, config, &mut rng, &spec.describe())
}

pub const HISTOGRAM_BINS: usize = 21;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub mean: Vec<[f64; 4]>,
    pub std: Vec<[f64; 4]>,
    /// Terminal `rho01 - rho10` of every run, in run order.
    pub deltas: Vec<f64>,
    /// Terminal shares of every run.
    pub terminal: Vec<[f64; 4]>,
    /// Counts over bins of width 0.1 centred on -1.0, -0.9, ..., 1.0.
    pub histogram: Vec<usize>,
    pub std_delta: f64,
    pub mean_delta: f64,
    pub converged_runs: usize,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EnsembleSummary {
    pub fn from_runs(runs: &[SimResult]) -> Self {
        assert!(!runs.is_empty(), "ensemble needs at least one run");
        let times = runs[0].trajectory.times.clone();
        let mut mean = Vec::with_capacity(times.len());
        let mut std = Vec::with_capacity(times.len());
        for ti in 0..times.len() {
            let mut m = [0.0; 4];
            let mut sd = [0.0; 4];
            for s in 0..4 {
                (m[s], sd[s]) = mean_std(runs.iter().map(|r| r.trajectory.shares[ti][s]));
            }
            mean.push(m);
            std.push(sd);
        }
        let terminal: Vec<[f64; 4]> = runs.iter().map(SimResult::final_shares).collect();
        let deltas: Vec<f64> = terminal.iter().map(|s| s[1] - s[2]).collect();
        let (mean_delta, std_delta) = mean_std(deltas.iter().copied());
        let mut histogram = vec![0usize; HISTOGRAM_BINS];
        for d in &deltas {
            let bin = ((d + 1.0) * 10.0).round().clamp(0.0, (HISTOGRAM_BINS - 1) as f64) as usize;
            histogram[bin] += 1;
        }
        EnsembleSummary {
            times,
            mean,
            std,
            deltas,
            terminal,
            histogram,
            std_delta,
            mean_delta,
            converged_runs: runs.iter().filter(|r| r.converged).count(),
        }
    }

    pub fn n_runs(&self) -> usize {
        self.deltas.len()
    }

    pub fn bin_center(bin: usize) -> f64 {
        (bin as f64 - 10.0) / 10.0
    }

    /// Monte-Carlo standard error of `std_delta` under a normal approximation.
    pub fn std_delta_error(&self) -> f64 {
        let n = self.n_runs();
        if n < 2 {
            return 0.0;
        }
        self.std_delta / (2.0 * (n - 1) as f64).sqrt()
    }

    /// Fraction of runs where one of `01`/`10` ends above `threshold`.
    pub fn fraction_dominated(&self, threshold: f64) -> f64 {
        let hits = self.terminal.iter().filter(|s| s[1].max(s[2]) > threshold).count();
        hits as f64 / self.n_runs() as f64
    }

    /// `t,mean00,mean01,mean10,mean11,std00,std01,std10,std11`.
    pub fn write_csv<W: Write>(&self, out: W, header: &[String]) -> Result<()> {
        let mut w = csv_with_header(out, header)?;
        w.write_record(["t", "mean00", "mean01", "mean10", "mean11", "std00", "std01", "std10", "std11"])?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.mean[i].iter().map(f64::to_string));
            row.extend(self.std[i].iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `delta_bin,count`.
    pub fn write_histogram_csv<W: Write>(&self, out: W, header: &[String]) -> Result<()> {
        let mut w = csv_with_header(out, header)?;
        w.write_record(["delta_bin", "count"])?;
        for (bin, c) in self.histogram.iter().enumerate() {
            w.write_record([Self::bin_center(bin).to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs members `0..n_runs` in parallel and summarizes them in run order.
pub fn run_ensemble(spec: &NetworkSpec, config: &SimConfig, n_runs: usize) -> Result<EnsembleSummary> {
    let runs = run_ensemble_members(spec, config, n_runs)?;
    Ok(EnsembleSummary::from_runs(&runs))
}

pub fn run_ensemble_members(spec: &NetworkSpec, config: &SimConfig, n_runs: usize) -> Result<Vec<SimResult>> {
    if n_runs == 0 {
        return Err(Error::Parameter("ensemble needs at least one run".into()));
    }
    config.validate()?;
    (0..n_runs as u64).into_par_iter().map(|run| run_member(spec, config, run)).collect()
}

/// Model parameter varied by a symmetry sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    Delta,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::Beta => "beta",
        }
    }

    pub fn apply(self, model: &Model, value: f64) -> Result<Model> {
        let m = match (self, model) {
            (SweepParam::Delta, Model::Coordination(p)) => {
                Model::Coordination(crate::games::CoordinationParams { delta: value, ..*p })
            }
            (SweepParam::Beta, Model::Utility(p)) => Model::Utility(crate::games::UtilityParams { beta: value, ..*p }),
            _ => {
                return Err(Error::Parameter(format!("cannot sweep {} in the {} model", self.name(), model.name())));
            }
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<(f64, EnsembleSummary)>,
}

impl SweepTable {
    /// `param,std_delta,std_delta_se,mean_delta,n_runs`.
    pub fn write_csv<W: Write>(&self, out: W, header: &[String]) -> Result<()> {
        let mut w = csv_with_header(out, header)?;
        w.write_record([self.param.name(), "std_delta", "std_delta_se", "mean_delta", "n_runs"])?;
        for (v, s) in &self.rows {
            w.write_record([
                v.to_string(),
                s.std_delta.to_string(),
                s.std_delta_error().to_string(),
                s.mean_delta.to_string(),
                s.n_runs().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `std(rho01(T) - rho10(T))` across `values` of the swept parameter.
pub fn symmetry_sweep(
    spec: &NetworkSpec,
    config: &SimConfig,
    param: SweepParam,
    values: &[f64],
    n_runs: usize,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::Parameter("sweep needs at least one parameter value".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let cfg = SimConfig { model: param.apply(&config.model, v)?, ..config.clone() };
        rows.push((v, run_ensemble(spec, &cfg, n_runs)?));
    }
    Ok(SweepTable { param, rows })
}
