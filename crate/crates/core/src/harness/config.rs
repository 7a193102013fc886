use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::ChannelJson;
use crate::concat::ConcatDescriptor;
use crate::condensers::CondenserDescriptor;
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Closeness of a condenser's output on a panel of flat sources.
    VerifyCondenser,
    /// Erasure tolerance of an ensemble over all small patterns.
    ErasureCensus,
    /// Exact per-code tuned-decoder error on a BSC weight window.
    BscCensus,
    /// Monte-Carlo block error of a concatenated code.
    ConcatSim,
    /// Random instances of the extractor/condenser rank inequality.
    DualityScan,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::VerifyCondenser => "verify-condenser",
            ExperimentKind::ErasureCensus => "erasure-census",
            ExperimentKind::BscCensus => "bsc-census",
            ExperimentKind::ConcatSim => "concat-sim",
            ExperimentKind::DualityScan => "duality-scan",
        }
    }
}

/// One run, fully determined by this value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condenser: Option<CondenserDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<ConcatDescriptor>,
    /// Source min-entropy (verify-condenser) or erasure budget (erasure-census).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<usize>,
    /// Panel size for verify-condenser.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<usize>,
    /// Half-width of the BSC weight window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            condenser: None,
            ensemble: None,
            channel: None,
            code: None,
            entropy: None,
            sources: None,
            eta: None,
            trials: 0,
            seed: 0,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Checks that the fields the experiment reads are present.
    pub fn validate(&self) -> Result<()> {
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(Error::Config(format!("{} needs \"{field}\"", self.experiment.as_str())))
            }
        };
        match self.experiment {
            ExperimentKind::VerifyCondenser => {
                need(self.condenser.is_some(), "condenser")?;
                need(self.entropy.is_some(), "entropy")
            }
            ExperimentKind::ErasureCensus => {
                need(self.condenser.is_some(), "condenser")?;
                need(self.ensemble.is_some(), "ensemble")?;
                need(self.entropy.is_some(), "entropy")
            }
            ExperimentKind::BscCensus => {
                need(self.condenser.is_some(), "condenser")?;
                need(self.channel.is_some(), "channel")?;
                need(self.eta.is_some(), "eta")
            }
            ExperimentKind::ConcatSim => {
                need(self.code.is_some(), "code")?;
                need(self.channel.is_some(), "channel")
            }
            ExperimentKind::DualityScan => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let text = r#"{"experiment": "duality-scan", "trials": 5, "seed": 3}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!((cfg.experiment, cfg.trials, cfg.seed), (ExperimentKind::DualityScan, 5, 3));
        let missing = r#"{"experiment": "verify-condenser"}"#;
        assert!(matches!(ExperimentConfig::from_json(missing), Err(Error::Config(_))));
        let unknown = r#"{"experiment": "duality-scan", "trails": 5}"#;
        assert!(ExperimentConfig::from_json(unknown).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::new(ExperimentKind::DualityScan);
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
        let back = ExperimentConfig::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b);
    }
}
