//! Approximate master equations over `(strategy, degree, neighbor profile)`
//! classes.
//!
//! The flat state is laid out strategy-major: four blocks of equal length,
//! each holding degrees `0..=k_max` in ascending order and, within a degree,
//! profiles in lexicographic `(m00, m01, m10, m11)` order.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::combin;
use crate::error::{Error, Result};
use crate::games::{response_probability, Model, NeighborProfile, Strategy};
use crate::net::DegreeDistribution;
use crate::ode::{Integrator, OdeSystem};
use crate::trajectory::{csv_with_header, validate_samples, Trajectory, TrajectoryMeta};

/// Numerical floor for class occupancies.
pub const NEGATIVE_FLOOR: f64 = -1e-9;
/// Per-degree drift that triggers renormalization after a step.
pub const RENORMALIZE_DRIFT: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct AmeIndex {
    k_max: usize,
    /// Start of each degree within a strategy block; `offsets[k_max + 1]` is the block length.
    offsets: Vec<usize>,
    profiles: Vec<NeighborProfile>,
    degrees: Vec<usize>,
}

impl AmeIndex {
    pub fn new(k_max: usize) -> Self {
        let mut offsets = Vec::with_capacity(k_max + 2);
        let mut profiles = Vec::with_capacity(combin::profiles_up_to(k_max));
        let mut degrees = Vec::with_capacity(profiles.capacity());
        for k in 0..=k_max {
            offsets.push(profiles.len());
            for m in combin::enumerate(k) {
                profiles.push(m);
                degrees.push(k);
            }
        }
        offsets.push(profiles.len());
        AmeIndex { k_max, offsets, profiles, degrees }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Classes per strategy block.
    #[inline]
    pub fn block_len(&self) -> usize {
        self.profiles.len()
    }

    /// Total number of equations, `4 * sum_k C(k+3, 3)`.
    #[inline]
    pub fn len(&self) -> usize {
        4 * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Class (profile) position within a strategy block.
    #[inline]
    pub fn class_of(&self, m: &NeighborProfile) -> usize {
        self.offsets[m.degree()] + combin::rank(m)
    }

    #[inline]
    pub fn position(&self, s: Strategy, m: &NeighborProfile) -> usize {
        s.index() * self.block_len() + self.class_of(m)
    }

    pub fn unrank(&self, pos: usize) -> (Strategy, usize, NeighborProfile) {
        let block = self.block_len();
        let class = pos % block;
        (Strategy::from_index(pos / block), self.degrees[class], self.profiles[class])
    }

    #[inline]
    pub fn profile(&self, class: usize) -> &NeighborProfile {
        &self.profiles[class]
    }

    #[inline]
    pub fn degree(&self, class: usize) -> usize {
        self.degrees[class]
    }

    /// Class range of degree `k` inside a block.
    pub fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }
}

#[derive(Clone, Debug)]
pub struct AmeState {
    pub values: Vec<f64>,
    pub index: Arc<AmeIndex>,
    pub time: f64,
}

impl AmeState {
    /// Occupancy sum of degree `k` over all strategies and profiles.
    pub fn degree_total(&self, k: usize) -> f64 {
        let block = self.index.block_len();
        let range = self.index.degree_range(k);
        (0..4).map(|s| self.values[s * block + range.start..s * block + range.end].iter().sum::<f64>()).sum()
    }

    pub fn get(&self, s: Strategy, m: &NeighborProfile) -> f64 {
        self.values[self.index.position(s, m)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `t,s,k,m00,m01,m10,m11,value` rows (without header).
    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        for (pos, v) in self.values.iter().enumerate() {
            let (s, k, m) = self.index.unrank(pos);
            w.write_record([
                self.time.to_string(),
                s.label().to_string(),
                k.to_string(),
                m.m00.to_string(),
                m.m01.to_string(),
                m.m10.to_string(),
                m.m11.to_string(),
                v.to_string(),
            ])?;
        }
        Ok(())
    }
}

/// Full-state dump of several snapshots.
pub fn write_state_csv<W: Write>(out: W, header: &[String], states: &[AmeState]) -> Result<()> {
    let mut w = csv_with_header(out, header)?;
    w.write_record(["t", "s", "k", "m00", "m01", "m10", "m11", "value"])?;
    for st in states {
        st.write_rows(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn validate_seed_fractions(rho0: &[f64; 4]) -> Result<()> {
    if rho0.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::Parameter(format!("seed fractions must be non-negative: {rho0:?}")));
    }
    let total: f64 = rho0.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("seed fractions must sum to 1 (got {total})")));
    }
    Ok(())
}

/// Independent multinomial neighbor states around uniformly placed seeds.
pub fn init_ame(dd: &DegreeDistribution, rho0: [f64; 4]) -> Result<AmeState> {
    validate_seed_fractions(&rho0)?;
    let index = Arc::new(AmeIndex::new(dd.k_max));
    Ok(init_with_index(index, rho0))
}

fn init_with_index(index: Arc<AmeIndex>, rho0: [f64; 4]) -> AmeState {
    let block = index.block_len();
    let mut values = vec![0.0; 4 * block];
    for class in 0..block {
        let p = combin::multinomial_pmf(index.profile(class), &rho0);
        for s in 0..4 {
            values[s * block + class] = rho0[s] * p;
        }
    }
    AmeState { values, index, time: 0.0 }
}

/// `rho^s = sum_k q_k sum_m rho^s_{k,m}`.
pub fn aggregate_shares(state: &AmeState, dd: &DegreeDistribution) -> [f64; 4] {
    let block = state.index.block_len();
    let mut out = [0.0; 4];
    for (s, o) in out.iter_mut().enumerate() {
        let vals = &state.values[s * block..(s + 1) * block];
        for k in 0..=state.index.k_max() {
            let q = dd.q(k);
            if q > 0.0 {
                *o += q * vals[state.index.degree_range(k)].iter().sum::<f64>();
            }
        }
    }
    out
}

// ordered pairs (r, r') with r != r'
const PAIRS: [(usize, usize); 12] =
    [(0, 1), (0, 2), (0, 3), (1, 0), (1, 2), (1, 3), (2, 0), (2, 1), (2, 3), (3, 0), (3, 1), (3, 2)];
const NO_CLASS: u32 = u32::MAX;
const CHUNK: usize = 2048;

/// The AME as an ODE system for a fixed degree distribution and model.
pub struct AmeSystem {
    index: Arc<AmeIndex>,
    q: Vec<f64>,
    /// `response[class][from][to]`.
    response: Vec<[[f64; 4]; 4]>,
    /// `shift[class][p]`: class of `m - e_r + e_r'` for `PAIRS[p] = (r, r')`.
    shift: Vec<[u32; 12]>,
    model: Model,
    network: String,
}

impl AmeSystem {
    pub fn new(dd: &DegreeDistribution, model: Model) -> Self {
        let index = Arc::new(AmeIndex::new(dd.k_max));
        let block = index.block_len();
        let mut response = Vec::with_capacity(block);
        let mut shift = Vec::with_capacity(block);
        for class in 0..block {
            let m = *index.profile(class);
            response.push(Strategy::ALL.map(|s| response_probability(s, &m, &model)));
            let counts = m.counts();
            let mut row = [NO_CLASS; 12];
            for (p, &(r, r2)) in PAIRS.iter().enumerate() {
                if counts[r] > 0 {
                    let mut c = counts;
                    c[r] -= 1;
                    c[r2] += 1;
                    row[p] = index.class_of(&NeighborProfile::from_counts(c)) as u32;
                }
            }
            shift.push(row);
        }
        let q = (0..=dd.k_max).map(|k| dd.q(k)).collect();
        let network = format!("degree-distribution(k_max={}, z={})", dd.k_max, dd.mean_degree);
        AmeSystem { index, q, response, shift, model, network }
    }

    pub fn index(&self) -> &Arc<AmeIndex> {
        &self.index
    }

    /// Edge rates `phi[s][r][r']`, reduced in a fixed sequential order.
    pub fn edge_rates(&self, y: &[f64]) -> [[[f64; 4]; 4]; 4] {
        let block = self.index.block_len();
        let mut num = [[[0.0f64; 4]; 4]; 4];
        let mut den = [[0.0f64; 4]; 4];
        for r in 0..4 {
            let vals = &y[r * block..(r + 1) * block];
            for (class, &rho) in vals.iter().enumerate() {
                let k = self.index.degree(class);
                if k == 0 || rho == 0.0 {
                    continue;
                }
                let w = self.q[k] * rho;
                if w == 0.0 {
                    continue;
                }
                let counts = self.index.profile(class).counts();
                let f = &self.response[class][r];
                for s in 0..4 {
                    let ms = counts[s] as f64;
                    if ms == 0.0 {
                        continue;
                    }
                    let edges = ms * w;
                    den[s][r] += edges;
                    for r2 in 0..4 {
                        if r2 != r {
                            num[s][r][r2] += edges * f[r2];
                        }
                    }
                }
            }
        }
        let mut phi = [[[0.0f64; 4]; 4]; 4];
        for s in 0..4 {
            for r in 0..4 {
                if den[s][r] > 0.0 {
                    for r2 in 0..4 {
                        phi[s][r][r2] = num[s][r][r2] / den[s][r];
                    }
                }
            }
        }
        phi
    }

    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        let block = self.index.block_len();
        let phi = self.edge_rates(y);
        // total outflow rate of an r-neighbor of an s-player
        let out_rate: [[f64; 4]; 4] = std::array::from_fn(|s| {
            std::array::from_fn(|r| (0..4).filter(|&r2| r2 != r).map(|r2| phi[s][r][r2]).sum())
        });

        let (d0, rest) = dy.split_at_mut(block);
        let (d1, rest) = rest.split_at_mut(block);
        let (d2, d3) = rest.split_at_mut(block);
        d0.par_chunks_mut(CHUNK)
            .zip(d1.par_chunks_mut(CHUNK))
            .zip(d2.par_chunks_mut(CHUNK))
            .zip(d3.par_chunks_mut(CHUNK))
            .enumerate()
            .for_each(|(chunk, (((o0, o1), o2), o3))| {
                let start = chunk * CHUNK;
                for offset in 0..o0.len() {
                    let class = start + offset;
                    let d = self.class_derivative(y, class, block, &phi, &out_rate);
                    o0[offset] = d[0];
                    o1[offset] = d[1];
                    o2[offset] = d[2];
                    o3[offset] = d[3];
                }
            });
    }

    #[inline]
    fn class_derivative(
        &self,
        y: &[f64],
        class: usize,
        block: usize,
        phi: &[[[f64; 4]; 4]; 4],
        out_rate: &[[f64; 4]; 4],
    ) -> [f64; 4] {
        if self.index.degree(class) == 0 {
            return [0.0; 4];
        }
        let counts = self.index.profile(class).counts().map(|c| c as f64);
        let f = &self.response[class];
        let rho: [f64; 4] = std::array::from_fn(|s| y[s * block + class]);
        let mut enter_profile = [0.0f64; 4];
        for (p, &(r, r2)) in PAIRS.iter().enumerate() {
            let src = self.shift[class][p];
            if src == NO_CLASS {
                continue;
            }
            // a neighbor moved r' -> r, leaving profile m - e_r + e_r'
            let mult = counts[r2] + 1.0;
            let src = src as usize;
            for s in 0..4 {
                enter_profile[s] += mult * phi[s][r2][r] * y[s * block + src];
            }
        }
        std::array::from_fn(|s| {
            let leave_strategy = (0..4).filter(|&s2| s2 != s).map(|s2| f[s][s2]).sum::<f64>() * rho[s];
            let leave_profile = rho[s] * (0..4).map(|r| counts[r] * out_rate[s][r]).sum::<f64>();
            let enter_strategy: f64 = (0..4).filter(|&s2| s2 != s).map(|s2| f[s2][s] * rho[s2]).sum();
            -leave_strategy - leave_profile + enter_strategy + enter_profile[s]
        })
    }

    fn meta(&self, rho0: [f64; 4]) -> TrajectoryMeta {
        TrajectoryMeta { solver: "ame".into(), model: self.model, network: self.network.clone(), seed_fractions: rho0 }
    }

    fn shares(&self, y: &[f64]) -> [f64; 4] {
        let block = self.index.block_len();
        std::array::from_fn(|s| {
            (0..=self.index.k_max())
                .filter(|&k| self.q[k] > 0.0)
                .map(|k| {
                    let r = self.index.degree_range(k);
                    self.q[k] * y[s * block + r.start..s * block + r.end].iter().sum::<f64>()
                })
                .sum()
        })
    }

    /// Time derivative of `state`.
    pub fn rhs(&self, state: &AmeState) -> Vec<f64> {
        let mut dy = vec![0.0; state.values.len()];
        self.derivative(&state.values, &mut dy);
        dy
    }

    /// Integrates to `horizon`, sampling aggregate shares at `sample_times`.
    pub fn solve(&self, init: &AmeState, horizon: f64, sample_times: &[f64]) -> Result<Trajectory> {
        self.solve_with_snapshots(init, horizon, sample_times, &[]).map(|(t, _)| t)
    }

    /// Like [`solve`](Self::solve), also returning full states at `dump_times`.
    pub fn solve_with_snapshots(
        &self,
        init: &AmeState,
        horizon: f64,
        sample_times: &[f64],
        dump_times: &[f64],
    ) -> Result<(Trajectory, Vec<AmeState>)> {
        validate_samples(sample_times, horizon)?;
        validate_samples(dump_times, horizon)?;
        if init.values.len() != self.index.len() || init.index.k_max() != self.index.k_max() {
            return Err(Error::Parameter("initial state does not match the degree distribution".into()));
        }
        let mut stops: Vec<f64> = sample_times.iter().chain(dump_times).copied().chain([horizon]).collect();
        stops.sort_by(f64::total_cmp);
        stops.dedup();
        stops.retain(|&t| t >= init.time);

        let rho0 = self.shares(&init.values);
        let mut traj = Trajectory::new(self.meta(rho0));
        let mut snaps = Vec::new();
        let mut y = init.values.clone();
        Integrator::default().integrate(self, init.time, &mut y, &stops, |t, y| {
            if sample_times.contains(&t) {
                traj.push(t, self.shares(y));
            }
            if dump_times.contains(&t) {
                snaps.push(AmeState { values: y.to_vec(), index: self.index.clone(), time: t });
            }
        })?;
        Ok((traj, snaps))
    }
}

impl OdeSystem for AmeSystem {
    fn dim(&self) -> usize {
        self.index.len()
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.derivative(y, dy);
    }

    fn admissible(&self, y: &[f64]) -> bool {
        y.iter().all(|&v| v >= NEGATIVE_FLOOR)
    }

    fn project(&self, y: &mut [f64]) -> bool {
        project_blocks(&self.index, y)
    }
}

/// Clips negatives to zero and renormalizes any degree whose total drifted.
pub(crate) fn project_blocks(index: &AmeIndex, y: &mut [f64]) -> bool {
    let mut changed = false;
    for v in y.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            changed = true;
        }
    }
    let block = index.block_len();
    for k in 0..=index.k_max() {
        let r = index.degree_range(k);
        let total: f64 = (0..4).map(|s| y[s * block + r.start..s * block + r.end].iter().sum::<f64>()).sum();
        if total > 0.0 && (total - 1.0).abs() > RENORMALIZE_DRIFT {
            for s in 0..4 {
                for v in &mut y[s * block + r.start..s * block + r.end] {
                    *v /= total;
                }
            }
            changed = true;
        }
    }
    changed
}

/// Derivative of the AME at `state`.
pub fn ame_rhs(state: &AmeState, dd: &DegreeDistribution, model: &Model) -> Vec<f64> {
    AmeSystem::new(dd, *model).rhs(state)
}

pub fn ame_solve(
    init: &AmeState,
    dd: &DegreeDistribution,
    model: &Model,
    horizon: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    AmeSystem::new(dd, *model).solve(init, horizon, sample_times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::CoordinationParams;
    use crate::net::truncated_poisson;

    fn coord(delta: f64) -> Model {
        Model::Coordination(CoordinationParams::new(4.0, 4.0, 1.0, delta).unwrap())
    }

    #[test]
    fn index_size_and_roundtrip() {
        let idx = AmeIndex::new(11);
        assert_eq!(idx.block_len(), 1365);
        assert_eq!(idx.len(), 5460);
        for k_max in [0usize, 3, 30] {
            let idx = AmeIndex::new(k_max);
            let expected: usize = (0..=k_max).map(|k| combin::binomial(k as u64 + 3, k as u64) as usize).sum();
            assert_eq!(idx.len(), 4 * expected);
            for pos in 0..idx.len() {
                let (s, _, m) = idx.unrank(pos);
                assert_eq!(idx.position(s, &m), pos);
            }
        }
    }

    #[test]
    fn init_examples() {
        let dd = truncated_poisson(4.0, 0.999).unwrap();
        let st = init_ame(&dd, [1.0, 0.0, 0.0, 0.0]).unwrap();
        for pos in 0..st.values.len() {
            let (s, k, m) = st.index.unrank(pos);
            let expect = if s == Strategy::S00 && m.m00 == k { 1.0 } else { 0.0 };
            assert_eq!(st.values[pos], expect);
        }
        let rho0 = [0.98, 0.01, 0.01, 0.0];
        let st = init_ame(&dd, rho0).unwrap();
        let v = st.get(Strategy::S00, &NeighborProfile::new(0, 1, 0, 0));
        assert!((v - 0.0098).abs() < 1e-15);
        for k in 0..=dd.k_max {
            assert!((st.degree_total(k) - 1.0).abs() < 1e-12);
        }
        let agg = aggregate_shares(&st, &dd);
        for s in 0..4 {
            assert!((agg[s] - rho0[s]).abs() < 1e-12);
        }
        assert!(init_ame(&dd, [0.5, 0.6, 0.0, 0.0]).is_err());
        assert!(init_ame(&dd, [1.1, -0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn quiet_state_is_fixed_point() {
        let dd = truncated_poisson(4.0, 0.999).unwrap();
        let st = init_ame(&dd, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let d = ame_rhs(&st, &dd, &coord(0.0));
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_conserves_each_degree() {
        let dd = truncated_poisson(4.0, 0.999).unwrap();
        let st = init_ame(&dd, [0.7, 0.12, 0.1, 0.08]).unwrap();
        for model in [coord(-2.0), coord(0.0), coord(2.0)] {
            let sys = AmeSystem::new(&dd, model);
            let d = sys.rhs(&st);
            let block = sys.index().block_len();
            for k in 0..=dd.k_max {
                let r = sys.index().degree_range(k);
                let total: f64 = (0..4).map(|s| d[s * block + r.start..s * block + r.end].iter().sum::<f64>()).sum();
                assert!(total.abs() < 1e-10, "k={k}: {total}");
            }
        }
    }

    #[test]
    fn degree_zero_classes_frozen() {
        let dd = truncated_poisson(1.0, 0.999).unwrap();
        let st = init_ame(&dd, [0.6, 0.2, 0.1, 0.1]).unwrap();
        let d = ame_rhs(&st, &dd, &coord(0.0));
        let block = st.index.block_len();
        for s in 0..4 {
            assert_eq!(d[s * block], 0.0);
        }
    }

    #[test]
    fn state_dump_layout() {
        let dd = DegreeDistribution::point_mass(1);
        let st = init_ame(&dd, [0.5, 0.5, 0.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_state_csv(&mut buf, &[], &[st]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,s,k,m00,m01,m10,m11,value");
        assert_eq!(lines.len(), 1 + 4 * 5);
        assert_eq!(lines[1], "0,00,0,0,0,0,0,0.5");
        assert_eq!(lines[2], "0,00,1,0,0,0,1,0");
    }
}
