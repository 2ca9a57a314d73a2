use std::path::PathBuf;
use std::str::FromStr;

use pareto_tas::datasets::{self, Geometry};
use pareto_tas::BanditInstance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{CliError, Result};

/// Where `--instance` points to.
///
/// * an embedded name (`covid`),
/// * `gen:<geometry>:<size>:<d>[:<seed>]` for a random point cloud,
/// * anything else is read as a JSON instance file.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Embedded(String),
    Generated { geometry: Geometry, size: usize, d: usize, seed: u64 },
    File(PathBuf),
}

impl FromStr for InstanceSource {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if datasets::EMBEDDED.contains(&s) {
            return Ok(Self::Embedded(s.to_string()));
        }
        let Some(spec) = s.strip_prefix("gen:") else {
            return Ok(Self::File(PathBuf::from(s)));
        };
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::Usage(format!("expected gen:<geometry>:<size>:<d>[:<seed>], got {s:?}")));
        }
        let num = |x: &str| x.parse::<u64>().map_err(|_| CliError::Usage(format!("{x:?} is not a count")));
        Ok(Self::Generated {
            geometry: parts[0].parse()?,
            size: num(parts[1])? as usize,
            d: num(parts[2])? as usize,
            seed: parts.get(3).map_or(Ok(0), |x| num(x))?,
        })
    }
}

impl InstanceSource {
    pub fn load(&self) -> Result<BanditInstance> {
        match self {
            Self::Embedded(name) => {
                datasets::by_name(name).ok_or_else(|| CliError::Usage(format!("no embedded instance {name:?}")))
            }
            Self::Generated { geometry, size, d, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(datasets::generate(*geometry, *size, *d, &mut rng)?)
            }
            Self::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                Ok(BanditInstance::from_json(&text)?)
            }
        }
    }
}
