use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::games::Model;

/// Where a trajectory came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub solver: String,
    pub model: Model,
    pub network: String,
    pub seed_fractions: [f64; 4],
}

impl TrajectoryMeta {
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("solver={}", self.solver), format!("model={}", self.model.name())];
        lines.extend(self.model.param_pairs().into_iter().map(|(k, v)| format!("{k}={v}")));
        lines.push(format!("network={}", self.network));
        let r = self.seed_fractions;
        lines.push(format!("rho0={},{},{},{}", r[0], r[1], r[2], r[3]));
        lines
    }
}

/// Sampled aggregate shares `(rho00, rho01, rho10, rho11)` over time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub shares: Vec<[f64; 4]>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(meta: TrajectoryMeta) -> Self {
        Trajectory { times: Vec::new(), shares: Vec::new(), meta }
    }

    pub fn push(&mut self, t: f64, shares: [f64; 4]) {
        self.times.push(t);
        self.shares.push(shares);
    }

    pub fn last(&self) -> Option<&[f64; 4]> {
        self.shares.last()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t,rho00,rho01,rho10,rho11` with `# key=value` header lines.
    pub fn write_csv<W: Write>(&self, out: W, extra_header: &[String]) -> Result<()> {
        let mut header = extra_header.to_vec();
        header.extend(self.meta.header_lines());
        let mut w = csv_with_header(out, &header)?;
        w.write_record(["t", "rho00", "rho01", "rho10", "rho11"])?;
        for (t, s) in self.times.iter().zip(&self.shares) {
            w.write_record([t.to_string(), s[0].to_string(), s[1].to_string(), s[2].to_string(), s[3].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes `# line` comments, then hands back a CSV writer for the body.
pub fn csv_with_header<W: Write>(mut out: W, header: &[String]) -> Result<csv::Writer<W>> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    Ok(csv::Writer::from_writer(out))
}

/// Checks that sample times are finite, non-negative, strictly increasing and within `horizon`.
pub(crate) fn validate_samples(samples: &[f64], horizon: f64) -> Result<()> {
    use crate::error::Error;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Parameter(format!("horizon must be positive (got {horizon})")));
    }
    if samples.iter().any(|t| !(t.is_finite() && *t >= 0.0 && *t <= horizon)) {
        return Err(Error::Parameter(format!("sample times must lie in [0, {horizon}]")));
    }
    if samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("sample times must be strictly increasing".into()));
    }
    Ok(())
}

/// `0, step, 2*step, ..., horizon`.
pub fn uniform_times(horizon: f64, step: f64) -> Vec<f64> {
    let n = (horizon / step).round() as usize;
    (0..=n).map(|i| (i as f64 * step).min(horizon)).collect()
}
