use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use lgcp_palm::curve::linspace;
use lgcp_palm::{CovarianceFamily, LgcpModel, ModelConfig, Window};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RadiiSpec {
    /// Parses `MIN:MAX:COUNT`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        ensure!(parts.len() == 3, "radii must be MIN:MAX:COUNT, got {text:?}");
        Ok(Self {
            min: parts[0].trim().parse().with_context(|| format!("bad radius minimum {:?}", parts[0]))?,
            max: parts[1].trim().parse().with_context(|| format!("bad radius maximum {:?}", parts[1]))?,
            count: parts[2].trim().parse().with_context(|| format!("bad radius count {:?}", parts[2]))?,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

impl Default for RadiiSpec {
    fn default() -> Self {
        Self { min: 0.01, max: 0.25, count: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// `[x_min, x_max, y_min, y_max]`.
    pub window: [f64; 4],
    pub resolution: [usize; 2],
    pub patterns: u64,
    /// Conditioning points; when nonempty the reduced Palm process is simulated.
    pub conditioning: Vec<[f64; 2]>,
    /// Also thin each Palm pattern back to the base model.
    pub thin: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { window: [0.0, 1.0, 0.0, 1.0], resolution: [32, 32], patterns: 1, conditioning: Vec::new(), thin: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Band half-width in standard errors.
    pub standard_errors: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { standard_errors: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub family: CovarianceFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Reference lattice size for `F̂`.
    pub lattice: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { family: CovarianceFamily::Spherical, r_max: None, lattice: lgcp_palm::estimate::DEFAULT_F_LATTICE }
    }
}

/// Everything a command needs. Serialized back into every output, minus
/// the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Covariance scales swept by `curves` and `compare-g1-g2`; empty means
    /// the model's own scale.
    pub scales: Vec<f64>,
    pub radii: RadiiSpec,
    pub q: Vec<usize>,
    pub seed: u64,
    pub replications: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub simulate: SimulateConfig,
    pub oracle: OracleConfig,
    pub fit: FitConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig {
                family: CovarianceFamily::Spherical,
                variance: 4.0,
                scale: 0.2,
                mean_level: None,
                intensity: Some(50.0),
            },
            scales: Vec::new(),
            radii: RadiiSpec::default(),
            q: vec![16],
            seed: 1,
            replications: 10_000,
            out: None,
            simulate: SimulateConfig::default(),
            oracle: OracleConfig::default(),
            fit: FitConfig::default(),
        }
    }
}

/// Flag values that override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub q: Option<Vec<usize>>,
    pub radii: Option<RadiiSpec>,
    pub replications: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn apply(mut self, o: Overrides) -> Self {
        if o.out.is_some() {
            self.out = o.out;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(q) = o.q {
            self.q = q;
        }
        if let Some(r) = o.radii {
            self.radii = r;
        }
        if let Some(n) = o.replications {
            self.replications = n;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.radii;
        ensure!(r.count >= 1, "radii count must be at least 1");
        ensure!(r.min > 0.0 && r.max >= r.min && r.max.is_finite(), "radii need 0 < min ≤ max, got {}:{}", r.min, r.max);
        ensure!(!self.q.is_empty(), "q list is empty");
        for q in &self.q {
            ensure!(*q >= 2 && q.is_multiple_of(2), "q values must be even and at least 2, got {q}");
        }
        ensure!(self.replications >= 1, "replications must be at least 1");
        ensure!(self.scales.iter().all(|s| *s > 0.0 && s.is_finite()), "scales must be positive");
        self.model()?;
        self.window()?;
        let [nx, ny] = self.simulate.resolution;
        ensure!(nx >= 1 && ny >= 1, "simulation resolution must be positive");
        ensure!(self.oracle.standard_errors > 0.0, "oracle band must be positive");
        Ok(())
    }

    pub fn model(&self) -> Result<LgcpModel> {
        Ok(self.model.to_model()?)
    }

    /// Model with covariance scale `scale`.
    pub fn model_with_scale(&self, scale: f64) -> Result<LgcpModel> {
        Ok(ModelConfig { scale, ..self.model.clone() }.to_model()?)
    }

    pub fn scales(&self) -> Vec<f64> {
        if self.scales.is_empty() {
            vec![self.model.scale]
        } else {
            self.scales.clone()
        }
    }

    pub fn window(&self) -> Result<Window> {
        let [a, b, c, d] = self.simulate.window;
        Ok(Window::new(a, b, c, d)?)
    }

    /// Creates the output directory and checks that it takes files.
    pub fn output_dir(&self) -> Result<PathBuf> {
        let Some(dir) = self.out.clone() else { bail!("no output directory: pass --out or set LGCP_PALM_OUT") };
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let probe = dir.join(".write-test");
        std::fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", dir.display()))?;
        std::fs::remove_file(&probe)?;
        Ok(dir)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_spec_parses() {
        let r = RadiiSpec::parse("0.01:0.25:50").unwrap();
        assert_eq!(r, RadiiSpec::default());
        assert!(RadiiSpec::parse("0.1:0.2").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = ExperimentConfig { scales: vec![0.1, 0.3], q: vec![4, 16], ..Default::default() };
        let back: ExperimentConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = |f: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.q = vec![5]));
        assert!(bad(|c| c.q = vec![0]));
        assert!(bad(|c| c.radii.count = 0));
        assert!(bad(|c| c.radii.min = 0.0));
        assert!(bad(|c| c.replications = 0));
        assert!(bad(|c| c.model.intensity = None));
    }
}
