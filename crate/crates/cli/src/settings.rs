//! Experiment settings: `key=value` config files overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use multidiff_core::games::{CoordinationParams, UtilityParams};
use multidiff_core::sim::NetworkSpec;
use multidiff_core::Model;

use crate::error::{CliError, CliResult};

/// Flags shared by every experiment subcommand. Each one mirrors a config key.
#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// Plain-text `key=value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// coordination | utility
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long = "alphaA")]
    pub alpha_a: Option<f64>,
    #[arg(long = "alphaB")]
    pub alpha_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Initial share of 01 (A only) players.
    #[arg(long)]
    pub rho01: Option<f64>,
    /// Initial share of 10 (B only) players.
    #[arg(long)]
    pub rho10: Option<f64>,
    #[arg(long)]
    pub rho11: Option<f64>,
    /// Mean degree.
    #[arg(long)]
    pub z: Option<f64>,
    /// Number of nodes of generated networks.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// er | regular
    #[arg(long)]
    pub net: Option<String>,
    /// Edge list to use instead of a generated network.
    #[arg(long = "net-file")]
    pub net_file: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Sampling interval of output trajectories.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Master seed of the random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "model", "a", "b", "c", "delta", "alphaA", "alphaB", "beta", "gamma", "rho01", "rho10", "rho11", "z", "N", "net",
    "net-file", "dt", "T", "step", "runs", "seed", "out",
];

impl ParamArgs {
    fn flag_entries(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("model", self.model.clone());
        put("a", self.a.map(|v| v.to_string()));
        put("b", self.b.map(|v| v.to_string()));
        put("c", self.c.map(|v| v.to_string()));
        put("delta", self.delta.map(|v| v.to_string()));
        put("alphaA", self.alpha_a.map(|v| v.to_string()));
        put("alphaB", self.alpha_b.map(|v| v.to_string()));
        put("beta", self.beta.map(|v| v.to_string()));
        put("gamma", self.gamma.map(|v| v.to_string()));
        put("rho01", self.rho01.map(|v| v.to_string()));
        put("rho10", self.rho10.map(|v| v.to_string()));
        put("rho11", self.rho11.map(|v| v.to_string()));
        put("z", self.z.map(|v| v.to_string()));
        put("N", self.n.map(|v| v.to_string()));
        put("net", self.net.clone());
        put("net-file", self.net_file.as_ref().map(|p| p.display().to_string()));
        put("dt", self.dt.map(|v| v.to_string()));
        put("T", self.horizon.map(|v| v.to_string()));
        put("step", self.step.map(|v| v.to_string()));
        put("runs", self.runs.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        m
    }

    /// Config file entries with flags laid over them.
    pub fn resolve(&self) -> CliResult<Settings> {
        let mut entries = match &self.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        entries.extend(self.flag_entries());
        Settings::from_entries(&entries)
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("config line {}: unknown key '{k}'", i + 1)));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkChoice {
    Er,
    Regular,
    File(PathBuf),
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub model: Model,
    pub seeds: [f64; 4],
    pub z: f64,
    pub n: usize,
    pub network: NetworkChoice,
    pub dt: f64,
    pub horizon: f64,
    pub step: f64,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Whether `out` came from the user rather than the default.
    pub out_given: bool,
}

fn get<T: std::str::FromStr>(entries: &BTreeMap<String, String>, key: &str, default: T) -> CliResult<T> {
    match entries.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("invalid value '{v}' for {key}"))),
    }
}

impl Settings {
    pub fn from_entries(e: &BTreeMap<String, String>) -> CliResult<Self> {
        let model = match e.get("model").map(String::as_str).unwrap_or("coordination") {
            "coordination" => Model::Coordination(CoordinationParams::new(
                get(e, "a", 4.0)?,
                get(e, "b", 4.0)?,
                get(e, "c", 1.0)?,
                get(e, "delta", 0.0)?,
            )?),
            "utility" => Model::Utility(UtilityParams::new(
                get(e, "alphaA", 0.4)?,
                get(e, "alphaB", 0.4)?,
                get(e, "gamma", 0.2)?,
                get(e, "beta", 0.0)?,
            )?),
            other => return Err(CliError::Usage(format!("unknown model '{other}' (coordination | utility)"))),
        };
        let (r01, r10, r11): (f64, f64, f64) = (get(e, "rho01", 0.01)?, get(e, "rho10", 0.01)?, get(e, "rho11", 0.0)?);
        let seeds = [1.0 - r01 - r10 - r11, r01, r10, r11];
        if seeds.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(CliError::Usage(format!(
                "seed shares must be in [0,1] and sum to at most 1: {r01}, {r10}, {r11}"
            )));
        }
        let network = match (e.get("net-file"), e.get("net").map(String::as_str)) {
            (Some(path), None | Some("file")) => NetworkChoice::File(PathBuf::from(path)),
            (Some(_), Some(other)) => {
                return Err(CliError::Usage(format!("--net {other} conflicts with --net-file")));
            }
            (None, None | Some("er")) => NetworkChoice::Er,
            (None, Some("regular")) => NetworkChoice::Regular,
            (None, Some(other)) => return Err(CliError::Usage(format!("unknown network '{other}' (er | regular)"))),
        };
        let s = Settings {
            model,
            seeds,
            z: get(e, "z", 4.0)?,
            n: get(e, "N", 3000)?,
            network,
            dt: get(e, "dt", 0.01)?,
            horizon: get(e, "T", 50.0)?,
            step: get(e, "step", 1.0)?,
            runs: get(e, "runs", 100)?,
            seed: get(e, "seed", 1)?,
            out: PathBuf::from(e.get("out").map(String::as_str).unwrap_or("out")),
            out_given: e.contains_key("out"),
        };
        if !(s.z > 0.0 && s.z.is_finite()) {
            return Err(CliError::Usage(format!("z must be positive (got {})", s.z)));
        }
        if !(s.horizon > 0.0 && s.horizon.is_finite()) || !(s.step > 0.0 && s.step <= s.horizon) {
            return Err(CliError::Usage(format!("need 0 < step <= T (got step={}, T={})", s.step, s.horizon)));
        }
        if s.runs == 0 {
            return Err(CliError::Usage("runs must be at least 1".into()));
        }
        Ok(s)
    }

    /// Integer mean degree for regular graphs and phase fields.
    pub fn regular_degree(&self) -> CliResult<usize> {
        if self.z.fract() != 0.0 {
            return Err(CliError::Usage(format!("regular networks need an integer z (got {})", self.z)));
        }
        Ok(self.z as usize)
    }

    pub fn network_spec(&self) -> CliResult<NetworkSpec> {
        Ok(match &self.network {
            NetworkChoice::Er => NetworkSpec::ErdosRenyi { n: self.n, z: self.z },
            NetworkChoice::Regular => NetworkSpec::Regular { n: self.n, z: self.regular_degree()? },
            NetworkChoice::File(path) => {
                NetworkSpec::Fixed(std::sync::Arc::new(multidiff_core::net::load_network(path)?))
            }
        })
    }

    pub fn network_label(&self) -> String {
        match &self.network {
            NetworkChoice::Er => format!("er(N={}, z={})", self.n, self.z),
            NetworkChoice::Regular => format!("regular(N={}, z={})", self.n, self.z),
            NetworkChoice::File(p) => format!("file({})", p.display()),
        }
    }

    /// Parameter echo written at the top of every output file.
    pub fn header(&self, command: &str) -> Vec<String> {
        let mut h = vec![format!("command={command}"), format!("model={}", self.model.name())];
        h.extend(self.model.param_pairs().into_iter().map(|(k, v)| format!("{k}={v}")));
        let r = self.seeds;
        h.push(format!("rho0={},{},{},{}", r[0], r[1], r[2], r[3]));
        h.push(format!("network={}", self.network_label()));
        h.push(format!("dt={}", self.dt));
        h.push(format!("T={}", self.horizon));
        h.push(format!("runs={}", self.runs));
        h.push(format!("seed={}", self.seed));
        h
    }
}
