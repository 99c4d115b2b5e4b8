//! Mean-field closure over `(strategy, degree)` classes and sign fields of
//! the z-regular reduction.

use std::io::Write;

use serde::Serialize;

use crate::ame::validate_seed_fractions;
use crate::combin;
use crate::error::{Error, Result};
use crate::games::{response_probability, Model, NeighborProfile, Strategy};
use crate::net::DegreeDistribution;
use crate::ode::{Integrator, OdeSystem};
use crate::trajectory::{csv_with_header, validate_samples, Trajectory, TrajectoryMeta};

/// `rho[k][s]`, the share of degree-k players using strategy s.
#[derive(Clone, Debug, PartialEq)]
pub struct MfState {
    pub rho: Vec<[f64; 4]>,
    pub time: f64,
}

impl MfState {
    /// Every degree starts at the seed fractions.
    pub fn init(dd: &DegreeDistribution, rho0: [f64; 4]) -> Result<Self> {
        validate_seed_fractions(&rho0)?;
        Ok(MfState { rho: vec![rho0; dd.k_max + 1], time: 0.0 })
    }

    fn flat(&self) -> Vec<f64> {
        self.rho.iter().flatten().copied().collect()
    }
}

/// Profiles and response tables of one degree.
struct DegreeTable {
    profiles: Vec<NeighborProfile>,
    response: Vec<[[f64; 4]; 4]>,
}

impl DegreeTable {
    fn new(k: usize, model: &Model) -> Self {
        let profiles = combin::enumerate(k);
        let response = profiles.iter().map(|m| Strategy::ALL.map(|s| response_probability(s, m, model))).collect();
        DegreeTable { profiles, response }
    }

    /// `G[s][s'] = sum_m M_k(m, w) F_m(s -> s')`.
    fn transitions(&self, w: &[f64; 4]) -> [[f64; 4]; 4] {
        let mut g = [[0.0; 4]; 4];
        for (m, f) in self.profiles.iter().zip(&self.response) {
            let p = combin::multinomial_pmf(m, w);
            if p == 0.0 {
                continue;
            }
            for s in 0..4 {
                for s2 in 0..4 {
                    g[s][s2] += p * f[s][s2];
                }
            }
        }
        g
    }

    fn derivative(&self, rho: &[f64; 4], w: &[f64; 4]) -> [f64; 4] {
        flow(rho, &self.transitions(w))
    }
}

fn flow(rho: &[f64; 4], g: &[[f64; 4]; 4]) -> [f64; 4] {
    std::array::from_fn(|s| {
        let mut d = 0.0;
        for s2 in 0..4 {
            if s2 != s {
                d += rho[s2] * g[s2][s] - rho[s] * g[s][s2];
            }
        }
        d
    })
}

pub struct MfSystem {
    q: Vec<f64>,
    mean_degree: f64,
    tables: Vec<DegreeTable>,
    model: Model,
    network: String,
}

impl MfSystem {
    pub fn new(dd: &DegreeDistribution, model: Model) -> Self {
        let tables = (0..=dd.k_max).map(|k| DegreeTable::new(k, &model)).collect();
        MfSystem {
            q: dd.probs.clone(),
            mean_degree: dd.mean_degree,
            tables,
            model,
            network: format!("degree-distribution(k_max={}, z={})", dd.k_max, dd.mean_degree),
        }
    }

    pub fn k_max(&self) -> usize {
        self.tables.len() - 1
    }

    /// `omega^r = sum_{k>=1} k q_k / z * rho^r_k`.
    pub fn neighbor_shares(&self, y: &[f64]) -> [f64; 4] {
        let mut w = [0.0; 4];
        if self.mean_degree <= 0.0 {
            return w;
        }
        for k in 1..=self.k_max() {
            let weight = k as f64 * self.q[k] / self.mean_degree;
            for s in 0..4 {
                w[s] += weight * y[4 * k + s];
            }
        }
        w
    }

    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        let w = self.neighbor_shares(y);
        dy[..4].fill(0.0);
        for k in 1..=self.k_max() {
            let rho: [f64; 4] = y[4 * k..4 * k + 4].try_into().unwrap();
            dy[4 * k..4 * k + 4].copy_from_slice(&self.tables[k].derivative(&rho, &w));
        }
    }

    pub fn rhs(&self, state: &MfState) -> Vec<[f64; 4]> {
        let y = state.flat();
        let mut dy = vec![0.0; y.len()];
        self.derivative(&y, &mut dy);
        dy.chunks_exact(4).map(|c| c.try_into().unwrap()).collect()
    }

    fn shares(&self, y: &[f64]) -> [f64; 4] {
        std::array::from_fn(|s| (0..=self.k_max()).map(|k| self.q[k] * y[4 * k + s]).sum())
    }

    pub fn solve(&self, init: &MfState, horizon: f64, sample_times: &[f64]) -> Result<Trajectory> {
        self.solve_with_states(init, horizon, sample_times).map(|(t, _)| t)
    }

    /// Like [`solve`](Self::solve), also returning the per-degree state at every sample time.
    pub fn solve_with_states(
        &self,
        init: &MfState,
        horizon: f64,
        sample_times: &[f64],
    ) -> Result<(Trajectory, Vec<MfState>)> {
        validate_samples(sample_times, horizon)?;
        if init.rho.len() != self.k_max() + 1 {
            return Err(Error::Parameter("initial state does not match the degree distribution".into()));
        }
        let mut stops: Vec<f64> = sample_times.iter().copied().chain([horizon]).collect();
        stops.dedup();
        stops.retain(|&t| t >= init.time);
        let mut y = init.flat();
        let meta = TrajectoryMeta {
            solver: "mf".into(),
            model: self.model,
            network: self.network.clone(),
            seed_fractions: self.shares(&y),
        };
        let mut traj = Trajectory::new(meta);
        let mut states = Vec::new();
        Integrator::default().integrate(self, init.time, &mut y, &stops, |t, y| {
            if sample_times.contains(&t) {
                traj.push(t, self.shares(y));
                let rho = y.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
                states.push(MfState { rho, time: t });
            }
        })?;
        Ok((traj, states))
    }
}

impl OdeSystem for MfSystem {
    fn dim(&self) -> usize {
        4 * self.tables.len()
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.derivative(y, dy);
    }

    fn admissible(&self, y: &[f64]) -> bool {
        y.iter().all(|&v| v >= crate::ame::NEGATIVE_FLOOR)
    }

    fn project(&self, y: &mut [f64]) -> bool {
        let mut changed = false;
        for row in y.chunks_exact_mut(4) {
            for v in row.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                    changed = true;
                }
            }
            let total: f64 = row.iter().sum();
            if total > 0.0 && (total - 1.0).abs() > crate::ame::RENORMALIZE_DRIFT {
                row.iter_mut().for_each(|v| *v /= total);
                changed = true;
            }
        }
        changed
    }
}

pub fn mf_rhs(state: &MfState, dd: &DegreeDistribution, model: &Model) -> Vec<[f64; 4]> {
    MfSystem::new(dd, *model).rhs(state)
}

pub fn mf_solve(
    init: &MfState,
    dd: &DegreeDistribution,
    model: &Model,
    horizon: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    MfSystem::new(dd, *model).solve(init, horizon, sample_times)
}

/// Four-variable mean field of a z-regular graph, where every player's
/// neighbors follow the aggregate shares.
pub struct RegularMf {
    z: usize,
    table: DegreeTable,
}

impl RegularMf {
    pub fn new(z: usize, model: &Model) -> Self {
        RegularMf { z, table: DegreeTable::new(z, model) }
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn derivative(&self, shares: &[f64; 4]) -> [f64; 4] {
        self.table.derivative(shares, shares)
    }
}

impl OdeSystem for RegularMf {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let s: [f64; 4] = y.try_into().unwrap();
        dy.copy_from_slice(&self.derivative(&s));
    }
}

/// Derivatives with magnitude below this report sign 0.
pub const SIGN_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub rho01: f64,
    pub rho10: f64,
    pub feasible: bool,
    /// `(d rho01, d rho10, d rho11)/dt`; zero when infeasible.
    pub derivs: [f64; 3],
    pub signs: [i8; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseField {
    pub rho11: f64,
    pub z: usize,
    pub resolution: usize,
    /// Row-major: `rho01` index outer, `rho10` inner.
    pub points: Vec<PhasePoint>,
}

fn sign(v: f64) -> i8 {
    if v.abs() < SIGN_THRESHOLD {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

impl PhaseField {
    pub fn at(&self, i: usize, j: usize) -> &PhasePoint {
        &self.points[i * self.resolution + j]
    }

    pub fn feasible(&self) -> impl Iterator<Item = &PhasePoint> {
        self.points.iter().filter(|p| p.feasible)
    }

    /// `rho01,rho10,rho11,sign01,sign10,sign11,feasible`.
    pub fn write_csv<W: Write>(&self, out: W, header: &[String]) -> Result<()> {
        let mut w = csv_with_header(out, header)?;
        w.write_record(["rho01", "rho10", "rho11", "sign01", "sign10", "sign11", "feasible"])?;
        for p in &self.points {
            w.write_record([
                p.rho01.to_string(),
                p.rho10.to_string(),
                self.rho11.to_string(),
                p.signs[0].to_string(),
                p.signs[1].to_string(),
                p.signs[2].to_string(),
                u8::from(p.feasible).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Signs of the z-regular mean-field derivatives over the `(rho01, rho10)`
/// grid at a fixed `rho11` slice.
pub fn phase_field(model: &Model, z: usize, rho11_slice: f64, resolution: usize) -> Result<PhaseField> {
    if z < 1 {
        return Err(Error::Parameter("phase field needs z >= 1".into()));
    }
    if !(0.0..1.0).contains(&rho11_slice) {
        return Err(Error::Parameter(format!("rho11 slice {rho11_slice} leaves no feasible region")));
    }
    if resolution < 2 {
        return Err(Error::Parameter("grid resolution must be at least 2".into()));
    }
    let sys = RegularMf::new(z, model);
    let step = 1.0 / (resolution - 1) as f64;
    let mut points = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let (x, y) = (i as f64 * step, j as f64 * step);
            let rho00 = 1.0 - x - y - rho11_slice;
            let feasible = rho00 >= -1e-12;
            let derivs = if feasible {
                let d = sys.derivative(&[rho00.max(0.0), x, y, rho11_slice]);
                [d[1], d[2], d[3]]
            } else {
                [0.0; 3]
            };
            points.push(PhasePoint { rho01: x, rho10: y, feasible, derivs, signs: derivs.map(sign) });
        }
    }
    Ok(PhaseField { rho11: rho11_slice, z, resolution, points })
}
