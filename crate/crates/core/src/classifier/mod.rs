//! Feature tables, information-gain ranking, decision trees, random forests
//! and stratified cross-validation.

mod cv;
mod entropy;
mod forest;
mod model;
mod tree;

pub use cv::{cross_validate, stratified_folds, Algo, CvResult};
pub use entropy::{best_split, entropy, info_gain, rank_features, RankedFeature, Split};
pub use forest::{train_forest, ForestParams, RandomForest};
pub use model::{Model, ModelFile};
pub use tree::{train_tree, DecisionTree, Node, TreeParams};

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::Label;
use crate::status::MinMax;
use crate::triad::TriadClass;

/// Which feature groups a table carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureMode {
    DegreeOnly,
    Tsp,
    TspDeg,
    Ss,
    SsDeg,
    Cascaded,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 6] = [
        FeatureMode::DegreeOnly,
        FeatureMode::Tsp,
        FeatureMode::TspDeg,
        FeatureMode::Ss,
        FeatureMode::SsDeg,
        FeatureMode::Cascaded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::DegreeOnly => "degree-only",
            FeatureMode::Tsp => "tsp",
            FeatureMode::TspDeg => "tsp+deg",
            FeatureMode::Ss => "ss",
            FeatureMode::SsDeg => "ss+deg",
            FeatureMode::Cascaded => "cascaded",
        }
    }

    pub fn uses_tsp(self) -> bool {
        matches!(self, FeatureMode::Tsp | FeatureMode::TspDeg | FeatureMode::Cascaded)
    }

    pub fn uses_status(self) -> bool {
        matches!(self, FeatureMode::Ss | FeatureMode::SsDeg | FeatureMode::Cascaded)
    }

    pub fn uses_degrees(self) -> bool {
        matches!(
            self,
            FeatureMode::DegreeOnly | FeatureMode::TspDeg | FeatureMode::SsDeg | FeatureMode::Cascaded
        )
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature mode {s:?}")))
    }
}

pub const STATUS_COLUMNS: [&str; 3] = ["status", "followee_status", "plp"];
pub const DEGREE_COLUMNS: [&str; 2] = ["indegree", "outdegree"];

/// Column layout of a feature table: TSP columns, then status columns,
/// then degrees, each group present only when the mode uses it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub mode: FeatureMode,
    pub columns: Vec<String>,
}

impl FeatureSchema {
    pub fn new(mode: FeatureMode) -> Self {
        let mut columns: Vec<String> = Vec::new();
        if mode.uses_tsp() {
            columns.extend(TriadClass::FEATURES.iter().map(|c| c.label().to_string()));
        }
        if mode.uses_status() {
            columns.extend(STATUS_COLUMNS.iter().map(|s| s.to_string()));
        }
        if mode.uses_degrees() {
            columns.extend(DEGREE_COLUMNS.iter().map(|s| s.to_string()));
        }
        FeatureSchema { mode, columns }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    /// Raw node ID.
    pub user: u64,
    pub values: Vec<f64>,
    pub label: Label,
}

/// Rows sharing one schema, plus the followee-status scale they were
/// normalized with.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub schema: FeatureSchema,
    pub rows: Vec<FeatureRow>,
    pub followee_norm: Option<MinMax>,
}

impl FeatureTable {
    pub fn new(schema: FeatureSchema, rows: Vec<FeatureRow>, followee_norm: Option<MinMax>) -> Result<Self> {
        let width = schema.width();
        if let Some(r) = rows.iter().find(|r| r.values.len() != width) {
            return Err(Error::SchemaMismatch(format!(
                "row for user {} has {} values, schema has {width}",
                r.user,
                r.values.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.values.iter().any(|v| !v.is_finite())) {
            return Err(Error::SchemaMismatch(format!("row for user {} has a non-finite value", r.user)));
        }
        Ok(FeatureTable {
            schema,
            rows,
            followee_norm,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Restricts the table to the columns of `mode`, which must be a subset
    /// of this table's mode.
    pub fn project(&self, mode: FeatureMode) -> Result<FeatureTable> {
        let target = FeatureSchema::new(mode);
        let idx: Vec<usize> = target
            .columns
            .iter()
            .map(|c| {
                self.schema.column(c).ok_or_else(|| {
                    Error::SchemaMismatch(format!("column {c} not in {} table", self.schema.mode))
                })
            })
            .collect::<Result<_>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureRow {
                user: r.user,
                values: idx.iter().map(|&i| r.values[i]).collect(),
                label: r.label,
            })
            .collect();
        let norm = if mode.uses_status() { self.followee_norm } else { None };
        FeatureTable::new(target, rows, norm)
    }

    /// CSV text. An optional `# followee_status_minmax` line precedes the
    /// header `mode=<mode>,user,<columns...>,label`.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if let Some(mm) = self.followee_norm {
            writeln!(w, "# followee_status_minmax {} {}", mm.min, mm.max)?;
        }
        write!(w, "mode={},user", self.schema.mode)?;
        for c in &self.schema.columns {
            write!(w, ",{c}")?;
        }
        writeln!(w, ",label")?;
        for r in &self.rows {
            write!(w, "{}", r.user)?;
            for v in &r.values {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{}", r.label)?;
        }
        w.flush()
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut norm = None;
        let mut schema: Option<FeatureSchema> = None;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let f: Vec<&str> = rest.split_ascii_whitespace().collect();
                if let ["followee_status_minmax", lo, hi] = f.as_slice() {
                    let p = |s: &str| {
                        s.parse::<f64>()
                            .map_err(|_| Error::parse(origin, lineno, "bad normalization bound"))
                    };
                    norm = Some(MinMax { min: p(lo)?, max: p(hi)? });
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match &schema {
                None => {
                    let mode = fields[0]
                        .strip_prefix("mode=")
                        .ok_or_else(|| Error::parse(origin, lineno, "header must start with mode="))?;
                    let mode: FeatureMode = mode
                        .parse()
                        .map_err(|e: Error| Error::parse(origin, lineno, e.to_string()))?;
                    let expected = FeatureSchema::new(mode);
                    let cols = &fields[1..];
                    let ok = cols.len() == expected.width() + 2
                        && cols[0] == "user"
                        && cols[cols.len() - 1] == "label"
                        && cols[1..cols.len() - 1]
                            .iter()
                            .zip(&expected.columns)
                            .all(|(a, b)| a == b);
                    if !ok {
                        return Err(Error::parse(
                            origin,
                            lineno,
                            format!("columns do not match the {mode} schema"),
                        ));
                    }
                    schema = Some(expected);
                }
                Some(s) => {
                    if fields.len() != s.width() + 2 {
                        return Err(Error::parse(
                            origin,
                            lineno,
                            format!("expected {} fields, got {}", s.width() + 2, fields.len()),
                        ));
                    }
                    let user = fields[0]
                        .parse::<u64>()
                        .map_err(|_| Error::parse(origin, lineno, "bad user id"))?;
                    let values = fields[1..=s.width()]
                        .iter()
                        .map(|v| {
                            v.parse::<f64>()
                                .ok()
                                .filter(|x| x.is_finite())
                                .ok_or_else(|| Error::parse(origin, lineno, format!("bad value {v:?}")))
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    let label: Label = fields[s.width() + 1]
                        .parse()
                        .map_err(|e: Error| Error::parse(origin, lineno, e.to_string()))?;
                    rows.push(FeatureRow { user, values, label });
                }
            }
        }
        let schema = schema.ok_or_else(|| Error::parse(origin, 0, "missing header"))?;
        FeatureTable::new(schema, rows, norm)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// Column-major copy of a set of rows, the layout the learners scan.
#[derive(Clone, Debug)]
pub(crate) struct Matrix {
    pub cols: Vec<Vec<f64>>,
    pub spam: Vec<bool>,
}

impl Matrix {
    pub fn from_rows<'a, I>(width: usize, rows: I) -> Matrix
    where
        I: IntoIterator<Item = &'a FeatureRow>,
    {
        let mut cols = vec![Vec::new(); width];
        let mut spam = Vec::new();
        for r in rows {
            for (c, v) in cols.iter_mut().zip(&r.values) {
                c.push(*v);
            }
            spam.push(r.label.is_spam());
        }
        Matrix { cols, spam }
    }

    pub fn n_rows(&self) -> usize {
        self.spam.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }
}
