//! Random graph generators, degree distributions and edge-list I/O.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::games::{NeighborProfile, Strategy};

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    pub probs: Vec<f64>,
    pub k_max: usize,
    pub mean_degree: f64,
}

impl DegreeDistribution {
    /// Wraps raw probabilities `q_0..=q_kmax`, renormalizing them to sum 1.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Parameter("degree distribution needs at least q_0".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Parameter("degree probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::Parameter("degree probabilities sum to zero".into()));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        Ok(Self::from_normalized(probs))
    }

    fn from_normalized(probs: Vec<f64>) -> Self {
        let k_max = probs.len() - 1;
        let mean_degree = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        DegreeDistribution { probs, k_max, mean_degree }
    }

    /// Degree distribution of a z-regular graph.
    pub fn point_mass(z: usize) -> Self {
        let mut probs = vec![0.0; z + 1];
        probs[z] = 1.0;
        Self::from_normalized(probs)
    }

    #[inline]
    pub fn q(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    /// `k,q_k` rows, preceded by any header comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "q_k"])?;
        for (k, p) in self.probs.iter().enumerate() {
            w.write_record([k.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Poisson(z) truncated at the smallest `k_max` whose cumulative mass
/// reaches `coverage`, then renormalized.
pub fn truncated_poisson(z: f64, coverage: f64) -> Result<DegreeDistribution> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Parameter(format!("mean degree must be positive (got {z})")));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::Parameter(format!("coverage must lie in (0,1) (got {coverage})")));
    }
    let mut probs = Vec::new();
    let mut term = (-z).exp();
    let mut cumulative = 0.0;
    for k in 0.. {
        if k > 0 {
            term *= z / k as f64;
        }
        probs.push(term);
        cumulative += term;
        if cumulative >= coverage {
            break;
        }
    }
    let probs = probs.iter().map(|p| p / cumulative).collect();
    Ok(DegreeDistribution::from_normalized(probs))
}

pub const DEFAULT_COVERAGE: f64 = 0.999;

/// Simple undirected graph with a strategy per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
    pub strategies: Vec<Strategy>,
    n_edges: usize,
    /// Original node ids for networks read from a file.
    ids: Option<Vec<String>>,
    /// Connection probability used by the ER generator.
    pub connection_prob: Option<f64>,
}

impl Network {
    /// Builds a simple graph; self-loops are dropped and duplicate edges collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for {n} nodes");
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let mut twice_m = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        Network {
            adjacency,
            strategies: vec![Strategy::S00; n],
            n_edges: twice_m / 2,
            ids: None,
            connection_prob: None,
        }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_nodes() == 0 {
            return 0.0;
        }
        2.0 * self.n_edges as f64 / self.n_nodes() as f64
    }

    pub fn id(&self, i: usize) -> String {
        match &self.ids {
            Some(ids) => ids[i].clone(),
            None => i.to_string(),
        }
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Current strategy counts of node `i`'s neighbors.
    #[inline]
    pub fn profile(&self, i: usize) -> NeighborProfile {
        let mut c = [0usize; 4];
        for &j in &self.adjacency[i] {
            c[self.strategies[j].index()] += 1;
        }
        NeighborProfile::from_counts(c)
    }

    pub fn strategy_counts(&self) -> [usize; 4] {
        let mut c = [0usize; 4];
        for s in &self.strategies {
            c[s.index()] += 1;
        }
        c
    }

    pub fn shares(&self) -> [f64; 4] {
        let n = self.n_nodes().max(1) as f64;
        self.strategy_counts().map(|c| c as f64 / n)
    }

    pub fn reset_strategies(&mut self) {
        self.strategies.fill(Strategy::S00);
    }

    /// `<id> <id>` per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.id(u), self.id(v))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_edge_list(std::io::BufWriter::new(File::create(path)?))
    }
}

/// Erdos-Renyi G(N, q) with `q = z/(N-1)`.
pub fn generate_er<R: Rng + ?Sized>(n: usize, z: f64, rng: &mut R) -> Result<Network> {
    if n < 2 {
        return Err(Error::Parameter(format!("ER graph needs N >= 2 (got {n})")));
    }
    if !(0.0..=(n - 1) as f64).contains(&z) {
        return Err(Error::Parameter(format!("mean degree z = {z} outside [0, N-1 = {}]", n - 1)));
    }
    let q = z / (n - 1) as f64;
    let mut edges = Vec::new();
    if q >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
    } else if q > 0.0 {
        // geometric skipping over the lower triangle (v > w)
        let log_q = (1.0 - q).ln();
        let (mut v, mut w): (usize, i64) = (1, -1);
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    let mut net = Network::from_edges(n, edges);
    net.connection_prob = Some(q);
    Ok(net)
}

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Uniform-ish random z-regular simple graph by stub pairing, restarting
/// whenever a self-loop or multi-edge appears.
pub fn generate_regular<R: Rng + ?Sized>(n: usize, z: usize, rng: &mut R) -> Result<Network> {
    if z == 0 {
        return Err(Error::Parameter("regular graph degree must be >= 1".into()));
    }
    if z >= n {
        return Err(Error::Parameter(format!("degree z = {z} must be below N = {n}")));
    }
    if (n * z) % 2 == 1 {
        return Err(Error::Parity { n, z });
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, z)).collect();
    let mut seen = HashSet::with_capacity(n * z / 2);
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(rng);
        seen.clear();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        let net = Network::from_edges(n, seen.iter().copied());
        return Ok(net);
    }
    Err(Error::Parameter(format!("no simple {z}-regular graph on {n} nodes after {MAX_PAIRING_ATTEMPTS} pairings")))
}

/// Reads a whitespace-separated edge list and keeps its largest connected
/// component. Blank lines and `#` comments are skipped.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Network> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected two node ids, found {} tokens", tokens.len()),
            });
        }
        let mut node = |id: &str| {
            *index.entry(id.to_string()).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            })
        };
        let (u, v) = (node(tokens[0]), node(tokens[1]));
        if u != v {
            edges.push((u, v));
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let full = Network::from_edges(ids.len(), edges);
    Ok(largest_component(&full, &ids))
}

pub fn load_network<P: AsRef<Path>>(path: P) -> Result<Network> {
    parse_edge_list(BufReader::new(File::open(path)?))
}

fn largest_component(net: &Network, ids: &[String]) -> Network {
    let n = net.n_nodes();
    let mut component = vec![usize::MAX; n];
    let mut best = (0usize, 0usize); // (size, label)
    let mut queue = VecDeque::new();
    let mut label = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = label;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in net.neighbors(u) {
                if component[v] == usize::MAX {
                    component[v] = label;
                    queue.push_back(v);
                }
            }
        }
        if size > best.0 {
            best = (size, label);
        }
        label += 1;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| component[i] == best.1).collect();
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let edges = net.edges().filter(|&(u, _)| component[u] == best.1).map(|(u, v)| (remap[u], remap[v]));
    let mut sub = Network::from_edges(keep.len(), edges);
    sub.ids = Some(keep.iter().map(|&i| ids[i].clone()).collect());
    sub
}

/// `q_k = (#nodes of degree k) / N`.
pub fn empirical_degree_distribution(net: &Network) -> DegreeDistribution {
    let n = net.n_nodes();
    let mut counts = vec![0usize; net.max_degree() + 1];
    for i in 0..n {
        counts[net.degree(i)] += 1;
    }
    let probs = counts.iter().map(|&c| c as f64 / n.max(1) as f64).collect();
    DegreeDistribution::from_normalized(probs)
}
