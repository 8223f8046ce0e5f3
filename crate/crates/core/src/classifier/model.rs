use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::status::MinMax;
use crate::tsp::TriadBaseline;

use super::forest::RandomForest;
use super::tree::DecisionTree;
use super::FeatureSchema;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase")]
pub enum Model {
    Tree(DecisionTree),
    Forest(RandomForest),
}

impl Model {
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        match self {
            Model::Tree(t) => t.predict_proba(row),
            Model::Forest(f) => f.predict_proba(row),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Tree(t) => t.n_features,
            Model::Forest(f) => f.n_features,
        }
    }
}

/// A trained model with the schema and normalization its rows were built
/// with. The triad baseline may be embedded or supplied at scoring time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: FeatureSchema,
    pub followee_norm: Option<MinMax>,
    pub baseline: Option<TriadBaseline>,
    pub seed: u64,
    pub model: Model,
}

impl ModelFile {
    pub fn new(
        schema: FeatureSchema,
        followee_norm: Option<MinMax>,
        baseline: Option<TriadBaseline>,
        seed: u64,
        model: Model,
    ) -> Result<Self> {
        if schema.width() != model.n_features() {
            return Err(Error::SchemaMismatch(format!(
                "schema has {} columns, model expects {}",
                schema.width(),
                model.n_features()
            )));
        }
        Ok(ModelFile {
            schema,
            followee_norm,
            baseline,
            seed,
            model,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: ModelFile = serde_json::from_str(&text)?;
        if m.schema != FeatureSchema::new(m.schema.mode) {
            return Err(Error::SchemaMismatch(format!(
                "{}: columns do not match the {} schema",
                path.display(),
                m.schema.mode
            )));
        }
        Ok(m)
    }
}
