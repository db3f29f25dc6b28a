//! Run configuration, read from TOML. Every field has a default, so an
//! empty file is a valid configuration.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    StarCheck,
    ModelSymbols,
    Torus,
    #[default]
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::StarCheck => "star-check",
            Command::ModelSymbols => "model-symbols",
            Command::Torus => "torus",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Random,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarConfig {
    pub instances: usize,
    pub max_vars: usize,
    pub max_degree: u32,
    pub form: FormKind,
    pub tolerance: f64,
}

impl Default for StarConfig {
    fn default() -> Self {
        StarConfig { instances: 200, max_vars: 4, max_degree: 4, form: FormKind::Random, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizeConfig {
    pub levels: usize,
    pub halfwidth: f64,
    pub points: usize,
    pub tolerance: f64,
    pub roundtrip_tolerance: f64,
}

impl Default for QuantizeConfig {
    fn default() -> Self {
        QuantizeConfig { levels: 40, halfwidth: 11.0, points: 256, tolerance: 1e-8, roundtrip_tolerance: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsConfig {
    /// `[re, im]` of the resolvent parameter checked against `diag(1/(m + 1/2 - z))`.
    pub resolvent_z: [f64; 2],
    pub resolvent_block: usize,
    pub resolvent_tolerance: f64,
    /// `(d, m)` pairs for the projector checks.
    pub projectors: Vec<[usize; 2]>,
    pub projector_tolerance: f64,
    pub contour_center: f64,
    pub contour_radius: f64,
    pub contour_nodes: usize,
    pub residue_tolerance: f64,
    pub inverse_z: Vec<[f64; 2]>,
    pub inverse_levels: usize,
    pub inverse_halfwidth: f64,
    pub inverse_points: usize,
    pub inverse_tolerance: f64,
}

impl Default for ModelsConfig {
    fn default() -> Self {
        ModelsConfig {
            resolvent_z: [-1.0, 0.0],
            resolvent_block: 30,
            resolvent_tolerance: 1e-4,
            projectors: vec![[1, 0], [1, 1], [1, 2], [2, 0], [2, 1]],
            projector_tolerance: 1e-6,
            contour_center: 0.5,
            contour_radius: 0.2,
            contour_nodes: 64,
            residue_tolerance: 1e-6,
            inverse_z: vec![[-1.0, 0.0], [-0.5, 0.5]],
            inverse_levels: 64,
            inverse_halfwidth: 14.0,
            inverse_points: 256,
            inverse_tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusConfig {
    pub field: f64,
    pub chern: u32,
    pub cluster_k: Vec<u32>,
    pub cluster_n: Vec<usize>,
    pub m_max: usize,
    pub cluster_tolerance: f64,
    pub weyl_runs: Vec<[usize; 2]>,
    pub weyl_lambda: f64,
    pub weyl_tolerance: f64,
    /// Amplitude `v` of `V = v cos(2 pi x / L)` for the band check.
    pub potential_v: f64,
    pub band_k: u32,
    pub band_n: Vec<usize>,
    pub band_cutoff: f64,
    pub band_margin: f64,
    pub min_gap: f64,
    pub max_dimension: usize,
    pub max_hermite: usize,
}

impl Default for TorusConfig {
    fn default() -> Self {
        TorusConfig {
            field: 1.0,
            chern: 1,
            cluster_k: vec![4, 8, 16],
            cluster_n: vec![64, 128],
            m_max: 2,
            cluster_tolerance: 0.02,
            weyl_runs: vec![[8, 64], [16, 128], [24, 256]],
            weyl_lambda: 1.0,
            weyl_tolerance: 0.1,
            potential_v: 0.1,
            band_k: 16,
            band_n: vec![64, 128],
            band_cutoff: 3.0,
            band_margin: 0.05,
            min_gap: 0.6,
            max_dimension: 262_144,
            max_hermite: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub out: String,
    pub seed: u64,
    pub jobs: usize,
    pub star: StarConfig,
    pub quantize: QuantizeConfig,
    pub models: ModelsConfig,
    pub torus: TorusConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::All,
            out: "heis-out".into(),
            seed: 20240607,
            jobs: 1,
            star: StarConfig::default(),
            quantize: QuantizeConfig::default(),
            models: ModelsConfig::default(),
            torus: TorusConfig::default(),
        }
    }
}

fn bad(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Range checks that do not depend on resource limits.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.star;
        if s.instances == 0 || s.instances > 100_000 {
            return Err(bad("star.instances", "must be in 1..=100000"));
        }
        if !(1..=6).contains(&s.max_vars) {
            return Err(bad("star.max_vars", "must be in 1..=6"));
        }
        if s.max_degree > 6 {
            return Err(bad("star.max_degree", "must be at most 6"));
        }
        let q = &self.quantize;
        if q.levels < 2 || q.points < 8 || !(q.halfwidth > 0.0) {
            return Err(bad("quantize", "levels >= 2, points >= 8 and halfwidth > 0 required"));
        }
        let m = &self.models;
        if m.contour_nodes < 4 || !(m.contour_radius > 0.0) {
            return Err(bad("models.contour", "at least 4 nodes and a positive radius required"));
        }
        if m.projectors.iter().any(|p| p[0] == 0 || p[0] > 2) {
            return Err(bad("models.projectors", "dimension d must be 1 or 2"));
        }
        let t = &self.torus;
        if !(t.field > 0.0) || t.chern == 0 {
            return Err(bad("torus", "field must be positive and chern a positive integer"));
        }
        if t.cluster_n.is_empty() || t.cluster_k.is_empty() {
            return Err(bad("torus.cluster_k", "k and N lists must be non-empty"));
        }
        if t.cluster_n.iter().chain(&t.band_n).chain(t.weyl_runs.iter().map(|r| &r[1])).any(|&n| n < 3) {
            return Err(bad("torus", "lattice sizes must be at least 3"));
        }
        if !(t.weyl_lambda > 0.0) || !(t.band_cutoff > 0.0) {
            return Err(bad("torus", "weyl_lambda and band_cutoff must be positive"));
        }
        Ok(())
    }

    /// Canonical JSON of every field that influences results.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("configuration serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("out");
            obj.remove("jobs");
        }
        serde_json::to_string(&v).expect("json value serializes")
    }

    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = RunConfig::default();
        cfg.torus.cluster_k = vec![0, 3];
        cfg.models.inverse_z = vec![[-2.0, 0.25]];
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn shipped_config_is_the_default() {
        let text = include_str!("../../../configs/default.toml");
        assert_eq!(RunConfig::from_toml(text).unwrap(), RunConfig::default());
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::from_toml("[torus]\nchern = \"two\"\n").unwrap_err();
        assert!(err.to_string().contains("chern"), "{err}");
        let err = RunConfig::from_toml("[star]\ninstances = 0\n").unwrap_err();
        assert!(err.to_string().contains("star.instances"));
        assert!(RunConfig::from_toml("[nope]\n").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::default();
        let b = RunConfig { out: "elsewhere".into(), jobs: 4, ..RunConfig::default() };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { seed: 1, ..RunConfig::default() };
        assert_ne!(a.hash(), c.hash());
    }
}
