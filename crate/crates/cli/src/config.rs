use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use irl_core::experiments::{CellSpec, ProblemSource};
use irl_core::instances::build_named;
use irl_core::mdp::{Dims, InstanceJson};
use irl_core::usirl::{Variant, DEFAULT_MAX_SAMPLES};
use irl_core::{IrlError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSource {
    /// Fresh random problem per seed.
    Random,
    Library {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "H")]
    pub h: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
    pub variant: Vec<Variant>,
    /// `null` entries stand for "no policy assumption" and only pair with
    /// known-policy variants.
    pub pi_min: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HausdorffSetting {
    Off,
    Exact,
    /// Exact where it fits, otherwise a lower/upper bracket.
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub axis: String,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: Grid,
    pub seeds: usize,
    pub base_seed: u64,
    pub instance: InstanceSource,
    pub max_samples: u64,
    pub hausdorff: HausdorffSetting,
    pub scaling: ScalingConfig,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: Grid {
                s: vec![4],
                a: vec![3],
                h: vec![3],
                epsilon: vec![0.5],
                delta: vec![0.1],
                variant: vec![Variant::InhomogeneousKnown],
                pi_min: vec![None],
            },
            seeds: 20,
            base_seed: 0,
            instance: InstanceSource::Random,
            max_samples: DEFAULT_MAX_SAMPLES,
            hausdorff: HausdorffSetting::Off,
            scaling: ScalingConfig {
                axis: "H".into(),
                values: vec![4, 6, 8, 12],
            },
            out: PathBuf::from("results.csv"),
            workers: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> IrlError {
    IrlError::Invalid(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let lens = [g.s.len(), g.a.len(), g.h.len(), g.epsilon.len(), g.delta.len(), g.variant.len(), g.pi_min.len()];
        if lens.contains(&0) {
            return Err(invalid("every grid axis needs at least one value"));
        }
        if self.seeds == 0 {
            return Err(invalid("seeds must be at least 1"));
        }
        if g.s.iter().chain(&g.a).chain(&g.h).any(|&x| x == 0) {
            return Err(invalid("S, A and H must be positive"));
        }
        if let InstanceSource::File { path } = &self.instance {
            if !path.is_file() {
                return Err(invalid(format!("instance file {} does not exist", path.display())));
            }
        }
        if g.variant.iter().any(|v| !v.known_policy()) && g.pi_min.iter().all(Option::is_none) {
            return Err(invalid("unknown-policy variants need a pi_min value"));
        }
        Ok(())
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.base_seed.wrapping_add(i)).collect()
    }

    pub fn problem_source(&self) -> Result<ProblemSource> {
        match &self.instance {
            InstanceSource::Random => Ok(ProblemSource::Random),
            InstanceSource::Library { name, params } => {
                let b = build_named(name, params)?;
                Ok(ProblemSource::Fixed(b.mdp, b.policy))
            }
            InstanceSource::File { path } => {
                let (m, pi) = load_instance(path)?;
                Ok(ProblemSource::Fixed(m, pi))
            }
        }
    }

    /// Cells in a fixed order; with a fixed instance its dimensions replace
    /// the S/A/H axes, which must then be left at a single value.
    pub fn cells(&self, source: &ProblemSource) -> Result<Vec<CellSpec>> {
        let g = &self.grid;
        let dims: Vec<Dims> = match source {
            ProblemSource::Fixed(m, _) => {
                if g.s.len() * g.a.len() * g.h.len() != 1 {
                    return Err(invalid("a fixed instance allows a single S, A, H"));
                }
                vec![m.dims()]
            }
            ProblemSource::Random => {
                let mut v = Vec::new();
                for &s in &g.s {
                    for &a in &g.a {
                        for &h in &g.h {
                            v.push(Dims::new(s, a, h));
                        }
                    }
                }
                v
            }
        };
        let mut cells = Vec::new();
        for &d in &dims {
            for &epsilon in &g.epsilon {
                for &delta in &g.delta {
                    for &variant in &g.variant {
                        let pis: Vec<Option<f64>> = if variant.known_policy() {
                            vec![None]
                        } else {
                            g.pi_min.iter().copied().flatten().map(Some).collect()
                        };
                        for pi_min in pis {
                            cells.push(CellSpec {
                                dims: d,
                                epsilon,
                                delta,
                                variant,
                                pi_min,
                                max_samples: self.max_samples,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

pub fn load_instance(path: &Path) -> Result<(irl_core::mdp::MdpR, irl_core::mdp::PolicyTable)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let inst: InstanceJson =
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad instance file {}: {e}", path.display())))?;
    inst.to_tables()
}
