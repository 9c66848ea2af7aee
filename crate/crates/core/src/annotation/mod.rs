//! Annotation schema: quantified count, attribute, object–object and
//! object–architecture specs, one comma-delimited line each, plus the on-disk dataset.

mod dataset;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::{check_round_trip, load_dataset, DatasetEntry, Difficulty, LoadedDataset, RoundTripMismatch, SPEC_FILES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("empty line")]
    EmptyLine,
    #[error("unknown quantifier '{0}'")]
    UnknownQuantifier(String),
    #[error("negative quantity {0}")]
    NegativeQuantity(i64),
    #[error("invalid integer '{0}'")]
    InvalidInteger(String),
    #[error("{kind} line needs {expected} fields, got {got}")]
    Arity {
        kind: FieldKind,
        expected: String,
        got: usize,
    },
    #[error("empty {0}")]
    EmptyField(&'static str),
    #[error("anchor index {index} out of range for {len} categories")]
    AnchorOutOfRange { index: i64, len: usize },
    #[error("unknown field kind '{0}'")]
    UnknownFieldKind(String),
    #[error("{entry}: {file} line {line}: {source}")]
    AtLine {
        entry: String,
        file: String,
        line: usize,
        source: Box<AnnotationError>,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Quantifier {
    pub const ALL: [Quantifier; 5] = [Quantifier::Eq, Quantifier::Lt, Quantifier::Gt, Quantifier::Le, Quantifier::Ge];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantifier::Eq => "eq",
            Quantifier::Lt => "lt",
            Quantifier::Gt => "gt",
            Quantifier::Le => "le",
            Quantifier::Ge => "ge",
        }
    }
}

impl FromStr for Quantifier {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantifier::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| AnnotationError::UnknownQuantifier(s.to_string()))
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether `actual` satisfies `q quantity`.
pub fn check_quantifier(q: Quantifier, quantity: u32, actual: u32) -> bool {
    match q {
        Quantifier::Eq => actual == quantity,
        Quantifier::Lt => actual < quantity,
        Quantifier::Gt => actual > quantity,
        Quantifier::Le => actual <= quantity,
        Quantifier::Ge => actual >= quantity,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Count,
    Attribute,
    Oo,
    Oa,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Count => "count",
            FieldKind::Attribute => "attribute",
            FieldKind::Oo => "oo",
            FieldKind::Oa => "oa",
        }
    }
}

impl FromStr for FieldKind {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(FieldKind::Count),
            "attribute" => Ok(FieldKind::Attribute),
            "oo" => Ok(FieldKind::Oo),
            "oa" => Ok(FieldKind::Oa),
            _ => Err(AnnotationError::UnknownFieldKind(s.to_string())),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSpec {
    pub quantifier: Quantifier,
    pub quantity: u32,
    pub category: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub quantifier: Quantifier,
    pub quantity: u32,
    pub category: String,
    pub attribute: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OORelationSpec {
    pub quantifier: Quantifier,
    pub quantity: u32,
    pub relation_text: String,
    /// Index of the anchor among `categories`; -1 means "unspecified" and selects the first.
    pub anchor_index: i64,
    /// Category tokens as written. `chair:1` and `chair*3` forms are accepted.
    pub categories: Vec<String>,
}

impl OORelationSpec {
    pub fn anchor_position(&self) -> usize {
        if self.anchor_index < 0 {
            0
        } else {
            self.anchor_index as usize
        }
    }

    pub fn anchor(&self) -> String {
        token_category(&self.categories[self.anchor_position()]).0
    }

    /// Non-anchor categories with instance counts, in first-appearance order.
    /// `chair, chair` and `chair*2` both give `(chair, 2)`; `chair:0` counts as one chair.
    pub fn target_groups(&self) -> Vec<(String, usize)> {
        let mut groups: Vec<(String, usize)> = Vec::new();
        for (i, tok) in self.categories.iter().enumerate() {
            if i == self.anchor_position() {
                continue;
            }
            let (name, n) = token_category(tok);
            match groups.iter_mut().find(|(g, _)| *g == name) {
                Some(g) => g.1 += n,
                None => groups.push((name, n)),
            }
        }
        groups
    }

    /// Every category mentioned, anchor first.
    pub fn category_names(&self) -> Vec<String> {
        let mut out = vec![self.anchor()];
        out.extend(self.target_groups().into_iter().map(|(c, _)| c));
        out
    }
}

/// Splits `name*n` / `name:k` tokens into the bare category and an instance count.
fn token_category(tok: &str) -> (String, usize) {
    if let Some((name, n)) = tok.rsplit_once('*') {
        if let Ok(n) = n.parse::<usize>() {
            return (name.to_string(), n);
        }
    }
    if let Some((name, k)) = tok.rsplit_once(':') {
        if k.parse::<usize>().is_ok() {
            return (name.to_string(), 1);
        }
    }
    (tok.to_string(), 1)
}

/// What an object–architecture spec refers to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchRef {
    Wall,
    Floor,
    Ceiling,
    Window,
    Door,
    Room,
    /// A room type such as `bedroom`.
    RoomType(String),
}

impl ArchRef {
    pub fn parse(s: &str) -> ArchRef {
        match s {
            "wall" => ArchRef::Wall,
            "floor" => ArchRef::Floor,
            "ceiling" => ArchRef::Ceiling,
            "window" => ArchRef::Window,
            "door" => ArchRef::Door,
            "room" => ArchRef::Room,
            other => ArchRef::RoomType(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            ArchRef::Wall => "wall",
            ArchRef::Floor => "floor",
            ArchRef::Ceiling => "ceiling",
            ArchRef::Window => "window",
            ArchRef::Door => "door",
            ArchRef::Room => "room",
            ArchRef::RoomType(s) => s,
        }
    }

    pub fn is_room(&self) -> bool {
        matches!(self, ArchRef::Room | ArchRef::RoomType(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OARelationSpec {
    pub quantifier: Quantifier,
    pub quantity: u32,
    pub relation_text: String,
    pub category: String,
    pub arch_ref: ArchRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpecLine {
    Count(CountSpec),
    Attribute(AttributeSpec),
    Oo(OORelationSpec),
    Oa(OARelationSpec),
}

fn field<'a>(tok: &'a str, name: &'static str) -> Result<&'a str, AnnotationError> {
    if tok.is_empty() {
        Err(AnnotationError::EmptyField(name))
    } else {
        Ok(tok)
    }
}

fn parse_int(tok: &str) -> Result<i64, AnnotationError> {
    tok.parse::<i64>()
        .map_err(|_| AnnotationError::InvalidInteger(tok.to_string()))
}

fn parse_quantity(tok: &str) -> Result<u32, AnnotationError> {
    let n = parse_int(tok)?;
    if n < 0 {
        return Err(AnnotationError::NegativeQuantity(n));
    }
    u32::try_from(n).map_err(|_| AnnotationError::InvalidInteger(tok.to_string()))
}

/// Parses one annotation line of the given kind. Tokens are trimmed; underscores are kept.
pub fn parse_spec_line(kind: FieldKind, line: &str) -> Result<SpecLine, AnnotationError> {
    let line = line.trim();
    if line.is_empty() {
        return Err(AnnotationError::EmptyLine);
    }
    let toks: Vec<&str> = line.split(',').map(str::trim).collect();
    let arity = |expected: &str| AnnotationError::Arity {
        kind,
        expected: expected.to_string(),
        got: toks.len(),
    };
    let exact = match kind {
        FieldKind::Count => Some(3),
        FieldKind::Attribute => Some(4),
        FieldKind::Oa => Some(5),
        FieldKind::Oo => None,
    };
    match exact {
        Some(n) if toks.len() != n => return Err(arity(&n.to_string())),
        None if toks.len() < 6 => return Err(arity("at least 6")),
        _ => {}
    }
    let quantifier: Quantifier = toks[0].parse()?;
    let quantity = parse_quantity(toks[1])?;
    Ok(match kind {
        FieldKind::Count => SpecLine::Count(CountSpec {
            quantifier,
            quantity,
            category: field(toks[2], "category")?.to_string(),
        }),
        FieldKind::Attribute => SpecLine::Attribute(AttributeSpec {
            quantifier,
            quantity,
            category: field(toks[2], "category")?.to_string(),
            attribute: field(toks[3], "attribute")?.to_string(),
        }),
        FieldKind::Oo => {
            let anchor_index = parse_int(toks[3])?;
            let categories = toks[4..]
                .iter()
                .map(|t| field(t, "category").map(str::to_string))
                .collect::<Result<Vec<_>, _>>()?;
            if anchor_index < -1 || anchor_index >= categories.len() as i64 {
                return Err(AnnotationError::AnchorOutOfRange {
                    index: anchor_index,
                    len: categories.len(),
                });
            }
            SpecLine::Oo(OORelationSpec {
                quantifier,
                quantity,
                relation_text: field(toks[2], "relation")?.to_string(),
                anchor_index,
                categories,
            })
        }
        FieldKind::Oa => SpecLine::Oa(OARelationSpec {
            quantifier,
            quantity,
            relation_text: field(toks[2], "relation")?.to_string(),
            category: field(toks[3], "category")?.to_string(),
            arch_ref: ArchRef::parse(field(toks[4], "architecture reference")?),
        }),
    })
}

impl fmt::Display for CountSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.quantifier, self.quantity, self.category)
    }
}

impl fmt::Display for AttributeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.quantifier, self.quantity, self.category, self.attribute)
    }
}

impl fmt::Display for OORelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.quantifier,
            self.quantity,
            self.relation_text,
            self.anchor_index,
            self.categories.join(",")
        )
    }
}

impl fmt::Display for OARelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.quantifier,
            self.quantity,
            self.relation_text,
            self.category,
            self.arch_ref.as_str()
        )
    }
}

impl fmt::Display for SpecLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecLine::Count(s) => s.fmt(f),
            SpecLine::Attribute(s) => s.fmt(f),
            SpecLine::Oo(s) => s.fmt(f),
            SpecLine::Oa(s) => s.fmt(f),
        }
    }
}
