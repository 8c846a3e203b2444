//! Run metadata embedded as `#` header lines in every output file.

use gc_twin::io::with_header;
use gc_twin::{MeshSpec, Scenario};
use sha2::{Digest, Sha256};

/// Everything needed to reproduce a run. Rendered in a fixed order so that
/// equal manifests give byte-identical files.
#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: &'static str,
    pub scenario: Option<String>,
    pub scenario_hash: Option<String>,
    pub placement: Option<String>,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub mesh: Option<MeshSpec>,
    pub extra: Vec<(&'static str, String)>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            ..Default::default()
        }
    }

    /// Records the scenarios used (hash over their canonical forms).
    pub fn with_scenarios(mut self, source: String, scenarios: &[&Scenario]) -> Self {
        let mut h = Sha256::new();
        for s in scenarios {
            h.update(s.to_toml().as_bytes());
        }
        self.scenario = Some(source);
        self.scenario_hash = Some(format!("{:x}", h.finalize()));
        if let [s] = scenarios {
            self.placement = Some(s.placement.to_string());
        }
        self
    }

    pub fn push(&mut self, key: &'static str, value: impl ToString) {
        self.extra.push((key, value.to_string()));
    }

    fn lines(&self) -> Vec<(&str, String)> {
        let mut v: Vec<(&str, String)> = vec![
            ("tool", format!("gc-twin {}", env!("CARGO_PKG_VERSION"))),
            ("command", self.command.to_string()),
        ];
        if let Some(s) = &self.scenario {
            v.push(("scenario", s.clone()));
        }
        if let Some(h) = &self.scenario_hash {
            v.push(("scenario_sha256", h.clone()));
        }
        if let Some(p) = &self.placement {
            v.push(("placement", p.clone()));
        }
        if let Some(s) = self.seed {
            v.push(("seed", s.to_string()));
        }
        if let Some(g) = &self.grid {
            v.push(("grid", g.clone()));
        }
        if let Some(m) = &self.mesh {
            v.push(("mesh", mesh_string(m)));
        }
        v.extend(self.extra.iter().map(|(k, s)| (*k, s.clone())));
        v
    }

    /// `body` with the manifest and any file-specific entries prepended.
    pub fn render(&self, file: &[(&str, String)], body: &str) -> String {
        let mut meta = self.lines();
        meta.extend(file.iter().cloned());
        with_header(&meta, body)
    }
}

pub fn mesh_string(m: &MeshSpec) -> String {
    format!("{}:{}:{}", m.nr, m.ntheta, m.nz)
}
