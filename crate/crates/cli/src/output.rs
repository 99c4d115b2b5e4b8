//! Output directory bookkeeping and the JSON run manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Every file written by a command, in order.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    params: &'a BTreeMap<String, Value>,
    network: &'a str,
    seed: u64,
    outputs: &'a [String],
}

impl Outputs {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Opens `name` for writing and records it.
    pub fn create(&mut self, name: &str) -> CliResult<BufWriter<File>> {
        let f = File::create(self.dir.join(name))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn text(&mut self, name: &str, content: &str) -> CliResult<()> {
        let mut w = self.create(name)?;
        w.write_all(content.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn manifest(
        &mut self,
        command: &str,
        params: &BTreeMap<String, Value>,
        network: &str,
        seed: u64,
    ) -> CliResult<()> {
        let m = Manifest { command, params, network, seed, outputs: &self.written };
        let mut json = serde_json::to_string_pretty(&m)?;
        json.push('\n');
        std::fs::write(self.dir.join("manifest.json"), json)?;
        Ok(())
    }
}

/// `params` map from `key=value` header lines.
pub fn params_from_header(header: &[String]) -> BTreeMap<String, Value> {
    header
        .iter()
        .filter_map(|l| l.split_once('='))
        .filter(|(k, _)| *k != "command")
        .map(|(k, v)| {
            let value = v.parse::<f64>().ok().and_then(|x| serde_json::Number::from_f64(x).map(Value::Number));
            (k.to_string(), value.unwrap_or_else(|| Value::String(v.to_string())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::new(dir.path()).unwrap();
        out.text("a.csv", "x\n").unwrap();
        let params = params_from_header(&["command=ame".into(), "a=4".into(), "model=coordination".into()]);
        out.manifest("ame", &params, "er(N=10, z=2)", 7).unwrap();
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let keys: Vec<usize> = ["\"command\"", "\"params\"", "\"network\"", "\"seed\"", "\"outputs\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["params"]["a"], 4.0);
        assert_eq!(v["params"]["model"], "coordination");
        assert_eq!(v["outputs"][0], "a.csv");
    }
}
