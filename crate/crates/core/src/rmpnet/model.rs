use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::kgstore::{RelationId, Vocabulary};
use crate::numkit::{Matrix, ParamId, ParamStore};
use crate::schema::SchemaVectors;
use crate::subgraph::EdgeType;

use super::{FusionMode, InitMode, ModelConfig, ModelError};

pub const EMBEDDING: &str = "relation_embedding";
pub const DISCLOSING: &str = "disclosing";
pub const FUSION: &str = "fusion";
pub const SCORER: &str = "scorer";
pub const SCHEMA_OUTER: &str = "schema.w1";
pub const SCHEMA_INNER: &str = "schema.w2";

pub fn layer_param_name(layer: usize, edge: EdgeType) -> String {
    format!("layer{layer}.{}", edge.label())
}

/// Handles of every tensor the forward pass reads.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamIds {
    pub embedding: Option<ParamId>,
    /// `layers[k][e]` transforms edge type `e` at layer `k + 1`.
    pub layers: Vec<[ParamId; EdgeType::COUNT]>,
    pub disclosing: Option<ParamId>,
    pub fusion: Option<ParamId>,
    pub scorer: ParamId,
    pub schema_outer: Option<ParamId>,
    pub schema_inner: Option<ParamId>,
}

/// Model configuration, parameters, and the relation names behind the
/// embedding rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub params: ParamStore,
    pub ids: ParamIds,
    relations: Vec<String>,
    row_of: HashMap<String, usize>,
}

fn xavier(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-bound..bound))
}

impl Model {
    /// Fresh parameters. `relations` names the embedding rows (the relations
    /// seen in training) and is ignored in schema mode.
    pub fn new(config: ModelConfig, relations: Vec<String>, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = config.dim;
        let mut params = ParamStore::new();

        let (embedding, relations) = match config.init {
            InitMode::Random => {
                if relations.is_empty() {
                    return Err(ModelError::InvalidConfig(
                        "random init needs at least one seen relation".into(),
                    ));
                }
                let table = xavier(&mut rng, relations.len(), d);
                (Some(params.register(EMBEDDING, table)), relations)
            }
            InitMode::Schema => (None, Vec::new()),
        };

        let mut layers = Vec::with_capacity(config.layers);
        for k in 0..config.layers {
            let ids = EdgeType::ALL.map(|e| params.register(layer_param_name(k, e), xavier(&mut rng, d, d)));
            layers.push(ids);
        }

        let disclosing = config
            .variant
            .disclosing()
            .then(|| params.register(DISCLOSING, xavier(&mut rng, d, d)));
        let fusion = (config.variant.disclosing() && config.fusion == FusionMode::Concat)
            .then(|| params.register(FUSION, xavier(&mut rng, d, 2 * d)));
        let scorer = params.register(SCORER, xavier(&mut rng, 1, d));

        let (schema_outer, schema_inner) = match config.init {
            InitMode::Schema => {
                let m = config.schema_hidden;
                let outer = params.register(SCHEMA_OUTER, xavier(&mut rng, d, m));
                let inner = params.register(SCHEMA_INNER, xavier(&mut rng, m, config.schema_dim));
                (Some(outer), Some(inner))
            }
            InitMode::Random => (None, None),
        };

        let ids = ParamIds {
            embedding,
            layers,
            disclosing,
            fusion,
            scorer,
            schema_outer,
            schema_inner,
        };
        Ok(Self::from_parts(config, params, ids, relations))
    }

    fn from_parts(config: ModelConfig, params: ParamStore, ids: ParamIds, relations: Vec<String>) -> Self {
        let row_of = relations.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Self {
            config,
            params,
            ids,
            relations,
            row_of,
        }
    }

    /// Rebuilds a model from stored tensors, resolving handles by name.
    pub fn from_store(config: ModelConfig, params: ParamStore, relations: Vec<String>) -> Result<Self, ModelError> {
        config.validate()?;
        let reference = Self::new(config.clone(), relations.clone(), 0)?;
        let mut resolve = |id: ParamId| -> Result<ParamId, ModelError> {
            let name = reference.params.name(id);
            let found = params
                .find(name)
                .ok_or_else(|| ModelError::InvalidConfig(format!("missing tensor {name}")))?;
            let want = reference.params.get(id).shape();
            let have = params.get(found).shape();
            if want != have {
                return Err(ModelError::InvalidConfig(format!(
                    "tensor {name} has shape {have:?}, expected {want:?}"
                )));
            }
            Ok(found)
        };
        let r = &reference.ids;
        let ids = ParamIds {
            embedding: r.embedding.map(&mut resolve).transpose()?,
            layers: r
                .layers
                .iter()
                .map(|row| {
                    let mut out = [ParamId(0); EdgeType::COUNT];
                    for (o, id) in out.iter_mut().zip(row) {
                        *o = resolve(*id)?;
                    }
                    Ok(out)
                })
                .collect::<Result<_, ModelError>>()?,
            disclosing: r.disclosing.map(&mut resolve).transpose()?,
            fusion: r.fusion.map(&mut resolve).transpose()?,
            scorer: resolve(r.scorer)?,
            schema_outer: r.schema_outer.map(&mut resolve).transpose()?,
            schema_inner: r.schema_inner.map(&mut resolve).transpose()?,
        };
        Ok(Self::from_parts(config, params, ids, relations))
    }

    /// Relation names behind the embedding rows.
    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn embedding_row(&self, name: &str) -> Option<usize> {
        self.row_of.get(name).copied()
    }

    /// Resolves where every relation of `vocab` takes its initial feature
    /// from. Random mode: trained rows by name, seeded draws otherwise.
    /// Schema mode: the relation's schema vector, which must exist.
    pub fn bind(
        &self,
        vocab: &Vocabulary,
        schema: Option<&SchemaVectors>,
        unseen_seed: u64,
    ) -> Result<RelationBinding, ModelError> {
        let mut slots = Vec::with_capacity(vocab.num_relations());
        for (i, name) in vocab.relation_names().iter().enumerate() {
            let slot = match self.config.init {
                InitMode::Random => match self.embedding_row(name) {
                    Some(row) => FeatureSlot::Row(row),
                    None => FeatureSlot::Fixed(self.fresh_vector(name, unseen_seed)),
                },
                InitMode::Schema => {
                    let schema = schema.ok_or(ModelError::SchemaRequired)?;
                    if schema.dim() != self.config.schema_dim {
                        return Err(ModelError::InvalidConfig(format!(
                            "schema vectors have width {}, model expects {}",
                            schema.dim(),
                            self.config.schema_dim
                        )));
                    }
                    let v = schema
                        .get(name)
                        .ok_or_else(|| ModelError::MissingSchemaVector(name.clone()))?;
                    FeatureSlot::Projected(v.to_vec())
                }
            };
            debug_assert_eq!(slots.len(), i);
            slots.push(slot);
        }
        Ok(RelationBinding { slots })
    }

    /// Draw from the embedding initializer, seeded by `(seed, name)`.
    pub fn fresh_vector(&self, name: &str, seed: u64) -> Vec<f64> {
        let digest = Sha256::digest(name.as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from_le_bytes(bytes));
        let rows = self.relations.len().max(1);
        let bound = (6.0 / (rows + self.config.dim) as f64).sqrt();
        (0..self.config.dim).map(|_| rng.gen_range(-bound..bound)).collect()
    }
}

/// Source of one relation's initial feature.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureSlot {
    /// Row of the learned embedding table.
    Row(usize),
    /// Constant `dim`-wide vector.
    Fixed(Vec<f64>),
    /// Schema vector passed through the two projection layers.
    Projected(Vec<f64>),
}

/// Per-relation feature sources for one vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationBinding {
    slots: Vec<FeatureSlot>,
}

impl RelationBinding {
    pub fn from_slots(slots: Vec<FeatureSlot>) -> Self {
        Self { slots }
    }

    pub fn slot(&self, relation: RelationId) -> Result<&FeatureSlot, ModelError> {
        self.slots.get(relation.0).ok_or(ModelError::UnknownRelation(relation))
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}
