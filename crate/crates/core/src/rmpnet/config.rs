use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    Sum,
    Concat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// Learned embedding rows for seen relations, seeded draws for unseen.
    Random,
    /// Projected schema vectors for every relation.
    Schema,
}

/// The four model variants: disclosing augmentation (NE) and target-aware
/// attention (TA) switched on or off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Base,
    Ne,
    Ta,
    NeTa,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Base, Variant::Ne, Variant::Ta, Variant::NeTa];

    pub fn disclosing(self) -> bool {
        matches!(self, Variant::Ne | Variant::NeTa)
    }

    pub fn target_attention(self) -> bool {
        matches!(self, Variant::Ta | Variant::NeTa)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::Ne => "ne",
            Variant::Ta => "ta",
            Variant::NeTa => "ne-ta",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ModelError::InvalidConfig(format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Subgraph extraction radius.
    pub hop: usize,
    /// Message passing depth; the pruned tree has this many levels.
    pub layers: usize,
    pub dim: usize,
    pub leaky_slope: f64,
    pub edge_dropout: f64,
    pub variant: Variant,
    pub fusion: FusionMode,
    pub init: InitMode,
    pub schema_dim: usize,
    pub schema_hidden: usize,
    /// PARA/LOOP hide the basic types they subsume on the same pair.
    pub suppress_basic_edges: bool,
    pub exclude_target_fact: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hop: 2,
            layers: 2,
            dim: 32,
            leaky_slope: 0.2,
            edge_dropout: 0.5,
            variant: Variant::Base,
            fusion: FusionMode::Sum,
            init: InitMode::Random,
            schema_dim: 300,
            schema_hidden: 128,
            suppress_basic_edges: true,
            exclude_target_fact: true,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.to_owned()));
        if self.hop == 0 {
            return bad("hop must be at least 1");
        }
        if self.layers == 0 {
            return bad("layers must be at least 1");
        }
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(0.0..1.0).contains(&self.edge_dropout) {
            return bad("edge dropout must lie in [0, 1)");
        }
        if self.init == InitMode::Schema && (self.schema_dim == 0 || self.schema_hidden == 0) {
            return bad("schema dimensions must be positive");
        }
        Ok(())
    }
}
