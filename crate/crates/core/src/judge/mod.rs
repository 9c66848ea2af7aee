//! Semantic judgments: category matching, attribute checks, support types, functional
//! sides and relation mapping. Backends return raw JSON which is validated here
//! before it reaches any metric.

mod cache;
mod mock;
mod prompts;
mod remote;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotation::{ArchRef, OARelationSpec, OORelationSpec};
use crate::relations::{OARelation, OORelation, Side};
use crate::scene::ObjectInstance;

pub use cache::{CachedJudge, TranscriptRecord};
pub use mock::MockJudge;
pub use prompts::{PromptSet, PROMPT_FILES};
pub use remote::{RemoteConfig, RemoteJudge, API_KEY_ENV};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JudgeError {
    #[error("missing fixture entry for {task}: {payload}")]
    MissingFixture { task: String, payload: String },
    #[error("malformed judgment for request {hash}: {message}")]
    Malformed { hash: String, message: String },
    #[error("remote judge failed for request {hash}: {message}")]
    Remote { hash: String, message: String },
    #[error("no transcript record for request {hash}")]
    ReplayMiss { hash: String },
    #[error("judge configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeTask {
    MatchCategory,
    VerifyAttribute,
    SupportType,
    FunctionalSides,
    MapOoRelation,
    MapOaRelation,
}

impl JudgeTask {
    pub const ALL: [JudgeTask; 6] = [
        JudgeTask::MatchCategory,
        JudgeTask::VerifyAttribute,
        JudgeTask::SupportType,
        JudgeTask::FunctionalSides,
        JudgeTask::MapOoRelation,
        JudgeTask::MapOaRelation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            JudgeTask::MatchCategory => "match_category",
            JudgeTask::VerifyAttribute => "verify_attribute",
            JudgeTask::SupportType => "support_type",
            JudgeTask::FunctionalSides => "functional_sides",
            JudgeTask::MapOoRelation => "map_oo_relation",
            JudgeTask::MapOaRelation => "map_oa_relation",
        }
    }
}

impl FromStr for JudgeTask {
    type Err = JudgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        JudgeTask::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| JudgeError::Config(format!("unknown judge task '{s}'")))
    }
}

impl fmt::Display for JudgeTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A judge query. The hash covers the task and payload; image files are inputs to
/// remote models only.
#[derive(Clone, Debug, PartialEq)]
pub struct JudgeRequest {
    pub task: JudgeTask,
    pub payload: Value,
    pub image_refs: Vec<PathBuf>,
}

fn images_of(obj: &ObjectInstance, which: &[&str]) -> Vec<PathBuf> {
    which
        .iter()
        .filter_map(|w| match *w {
            "front" => obj.image_refs.front.clone(),
            "scale" => obj.image_refs.scale.clone(),
            "context" => obj.image_refs.context.clone(),
            _ => None,
        })
        .collect()
}

impl JudgeRequest {
    pub fn new(task: JudgeTask, payload: Value) -> Self {
        Self {
            task,
            payload,
            image_refs: Vec::new(),
        }
    }

    pub fn match_category(obj: &ObjectInstance, categories: &[String]) -> Self {
        Self {
            task: JudgeTask::MatchCategory,
            payload: json!({
                "object_id": obj.id,
                "object_description": obj.description,
                "categories": categories,
            }),
            image_refs: images_of(obj, &["front"]),
        }
    }

    pub fn verify_attribute(obj: &ObjectInstance, category: &str, attribute: &str) -> Self {
        Self {
            task: JudgeTask::VerifyAttribute,
            payload: json!({
                "object_id": obj.id,
                "object_description": obj.description,
                "category": category,
                "attribute": attribute,
            }),
            image_refs: images_of(obj, &["front", "scale"]),
        }
    }

    pub fn support_type(obj: &ObjectInstance) -> Self {
        Self {
            task: JudgeTask::SupportType,
            payload: json!({
                "object_id": obj.id,
                "object_description": obj.description,
            }),
            image_refs: images_of(obj, &["front", "context"]),
        }
    }

    pub fn functional_sides(obj: &ObjectInstance) -> Self {
        Self::new(
            JudgeTask::FunctionalSides,
            json!({
                "object_id": obj.id,
                "object_description": obj.description,
            }),
        )
    }

    pub fn map_oo_relation(spec: &OORelationSpec) -> Self {
        Self::new(
            JudgeTask::MapOoRelation,
            json!({
                "relation": spec.relation_text,
                "anchor_index": spec.anchor_index,
                "categories": spec.categories,
            }),
        )
    }

    pub fn map_oa_relation(spec: &OARelationSpec, floor_ids: &[String]) -> Self {
        Self::new(
            JudgeTask::MapOaRelation,
            json!({
                "relation": spec.relation_text,
                "category": spec.category,
                "arch_ref": spec.arch_ref.as_str(),
                "floor_ids": floor_ids,
            }),
        )
    }

    /// Compact JSON with sorted keys.
    pub fn canonical_payload(&self) -> String {
        canonical_json(&self.payload)
    }

    pub fn canonical(&self) -> String {
        canonical_json(&json!({"task": self.task.as_str(), "payload": self.payload}))
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Serializes with object keys sorted at every level.
pub fn canonical_json(v: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let sorted: BTreeMap<&String, Value> = m.iter().map(|(k, v)| (k, sort(v))).collect();
                Value::Object(sorted.into_iter().map(|(k, v)| (k.clone(), v)).collect())
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&sort(v)).expect("json value serializes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMatch {
    /// `None` when the object matches no listed category.
    pub matched_category: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeVerdict {
    pub satisfied: bool,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportType {
    Ground,
    Object,
    Wall,
    Ceiling,
}

impl SupportType {
    pub fn parse(s: &str) -> Option<SupportType> {
        match s.trim().to_lowercase().as_str() {
            "ground" => Some(SupportType::Ground),
            "object" => Some(SupportType::Object),
            "wall" => Some(SupportType::Wall),
            "ceiling" => Some(SupportType::Ceiling),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionalSides {
    /// Subset of front/back/left/right in that order.
    pub sides: Vec<Side>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMapping {
    pub relation_text: String,
    pub mapped_types: Vec<OORelation>,
    pub sides: Vec<Option<Side>>,
    pub anchor_category: Option<String>,
    pub other_categories: Vec<String>,
    pub other_counts: Vec<usize>,
    /// Set when no catalogue relation fits.
    pub none_reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchMapping {
    pub relation: Option<OARelation>,
    pub element_type: Option<ArchRef>,
    pub specific_floors: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JudgeResponse {
    Match(CategoryMatch),
    Attribute(AttributeVerdict),
    Support { support_type: SupportType, reason: String },
    Sides(FunctionalSides),
    OoMapping(RelationMapping),
    OaMapping(ArchMapping),
}

/// Anything that answers judge requests with raw JSON.
pub trait Judge: Send + Sync {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError>;

    /// Raw answer checked against the task schema.
    fn judge(&self, request: &JudgeRequest) -> Result<JudgeResponse, JudgeError> {
        let raw = self.respond(request)?;
        validate_response(request, &raw)
    }
}

impl<J: Judge + ?Sized> Judge for &J {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        (**self).respond(request)
    }
}

impl<J: Judge + ?Sized> Judge for Box<J> {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        (**self).respond(request)
    }
}

impl<J: Judge + ?Sized> Judge for std::sync::Arc<J> {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        (**self).respond(request)
    }
}

/// Wraps a judge and keeps every (request hash, response) it passed through, so a scene
/// report can carry a digest of the judgments it used.
pub struct RecordingJudge<'a> {
    inner: &'a dyn Judge,
    log: Mutex<BTreeMap<String, String>>,
}

impl<'a> RecordingJudge<'a> {
    pub fn new(inner: &'a dyn Judge) -> Self {
        Self {
            inner,
            log: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.log.lock().expect("recording lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// SHA-256 over the sorted `hash\tresponse` lines.
    pub fn digest(&self) -> String {
        let log = self.log.lock().expect("recording lock");
        let mut h = Sha256::new();
        for (k, v) in log.iter() {
            h.update(k.as_bytes());
            h.update(b"\t");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

impl Judge for RecordingJudge<'_> {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        let raw = self.inner.respond(request)?;
        self.log
            .lock()
            .expect("recording lock")
            .insert(request.hash(), canonical_json(&raw));
        Ok(raw)
    }
}

fn malformed(req: &JudgeRequest, message: impl Into<String>) -> JudgeError {
    JudgeError::Malformed {
        hash: req.hash(),
        message: message.into(),
    }
}

fn get_str<'v>(raw: &'v Value, keys: &[&str]) -> Option<&'v str> {
    keys.iter().find_map(|k| raw.get(*k)).and_then(Value::as_str)
}

fn get_bool(raw: &Value, key: &str) -> Option<bool> {
    match raw.get(key)? {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.to_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn is_none_token(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::String(s) => s.eq_ignore_ascii_case("none") || s.is_empty(),
        _ => false,
    }
}

fn reason(raw: &Value) -> String {
    get_str(raw, &["reason"]).unwrap_or_default().to_string()
}

/// Checks a raw answer against its task schema and converts it.
pub fn validate_response(req: &JudgeRequest, raw: &Value) -> Result<JudgeResponse, JudgeError> {
    if !raw.is_object() {
        return Err(malformed(req, "response is not an object"));
    }
    match req.task {
        JudgeTask::MatchCategory => {
            let matched = get_bool(raw, "matched").ok_or_else(|| malformed(req, "missing 'matched'"))?;
            let category = get_str(raw, &["matched_category"]).unwrap_or("");
            if !matched {
                return Ok(JudgeResponse::Match(CategoryMatch {
                    matched_category: None,
                    reason: reason(raw),
                }));
            }
            let allowed = req.payload["categories"].as_array().cloned().unwrap_or_default();
            if !allowed.iter().any(|c| c.as_str() == Some(category)) {
                return Err(malformed(req, format!("category '{category}' was not offered")));
            }
            Ok(JudgeResponse::Match(CategoryMatch {
                matched_category: Some(category.to_string()),
                reason: reason(raw),
            }))
        }
        JudgeTask::VerifyAttribute => {
            let satisfied = get_bool(raw, "satisfied").ok_or_else(|| malformed(req, "missing 'satisfied'"))?;
            Ok(JudgeResponse::Attribute(AttributeVerdict {
                satisfied,
                reason: reason(raw),
            }))
        }
        JudgeTask::SupportType => {
            let s = get_str(raw, &["support_type"]).ok_or_else(|| malformed(req, "missing 'support_type'"))?;
            let support_type =
                SupportType::parse(s).ok_or_else(|| malformed(req, format!("unknown support type '{s}'")))?;
            Ok(JudgeResponse::Support {
                support_type,
                reason: reason(raw),
            })
        }
        JudgeTask::FunctionalSides => {
            let list = ["functional_sides", "functonal_sides", "sides"]
                .iter()
                .find_map(|k| raw.get(*k))
                .and_then(Value::as_array)
                .ok_or_else(|| malformed(req, "missing 'functional_sides'"))?;
            let mut sides = Vec::new();
            for v in list {
                let side = v
                    .as_str()
                    .and_then(Side::parse)
                    .filter(|s| s.is_lateral())
                    .ok_or_else(|| malformed(req, format!("invalid functional side {v}")))?;
                if !sides.contains(&side) {
                    sides.push(side);
                }
            }
            sides.sort_by_key(|s| [Side::Front, Side::Back, Side::Left, Side::Right].iter().position(|x| x == s));
            Ok(JudgeResponse::Sides(FunctionalSides { sides }))
        }
        JudgeTask::MapOoRelation => validate_oo_mapping(req, raw).map(JudgeResponse::OoMapping),
        JudgeTask::MapOaRelation => validate_oa_mapping(req, raw).map(JudgeResponse::OaMapping),
    }
}

fn validate_oo_mapping(req: &JudgeRequest, raw: &Value) -> Result<RelationMapping, JudgeError> {
    let relation_text = req.payload["relation"].as_str().unwrap_or_default().to_string();
    let types_v = ["relationship_types", "relationship_type"]
        .iter()
        .find_map(|k| raw.get(*k))
        .ok_or_else(|| malformed(req, "missing 'relationship_types'"))?;
    let type_list: Vec<Value> = match types_v {
        Value::Array(a) => a.clone(),
        other => vec![other.clone()],
    };
    let anchor_category = get_str(raw, &["anchor_object"]).map(str::to_string);
    let other_categories: Vec<String> = raw
        .get("other_objects")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
        .unwrap_or_default();
    let other_counts: Vec<usize> = raw
        .get("other_object_counts")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|v| v.as_u64().map(|n| n as usize)).collect())
        .unwrap_or_default();
    if type_list.is_empty() {
        return Err(malformed(req, "empty relationship type list"));
    }
    if type_list.iter().all(is_none_token) {
        let why = reason(raw);
        if why.is_empty() {
            return Err(malformed(req, "'None' mapping without a reason"));
        }
        return Ok(RelationMapping {
            relation_text,
            mapped_types: Vec::new(),
            sides: Vec::new(),
            anchor_category,
            other_categories,
            other_counts,
            none_reason: Some(why),
        });
    }
    let mut mapped_types = Vec::new();
    for v in &type_list {
        let name = v.as_str().unwrap_or_default();
        let r = OORelation::parse(name).ok_or_else(|| malformed(req, format!("'{name}' is not a catalogue relation")))?;
        mapped_types.push(r);
    }
    let sides_v: Vec<Value> = match ["sides", "side"].iter().find_map(|k| raw.get(*k)) {
        Some(Value::Array(a)) => a.clone(),
        Some(other) => vec![other.clone()],
        None => Vec::new(),
    };
    let sides_v = if sides_v.is_empty() {
        vec![Value::Null; mapped_types.len()]
    } else {
        sides_v
    };
    if sides_v.len() != mapped_types.len() {
        return Err(malformed(
            req,
            format!("{} sides for {} relation types", sides_v.len(), mapped_types.len()),
        ));
    }
    let mut sides = Vec::new();
    for (r, v) in mapped_types.iter().zip(&sides_v) {
        let side = if is_none_token(v) {
            None
        } else {
            let s = v.as_str().unwrap_or_default();
            Some(Side::parse(s).ok_or_else(|| malformed(req, format!("unknown side '{s}'")))?)
        };
        let ok = match r {
            OORelation::SideOf | OORelation::SideRegion => {
                side.is_some_and(|s| !matches!(s, Side::Long | Side::Short))
            }
            OORelation::LongShortSide => side.is_some_and(|s| matches!(s, Side::Long | Side::Short)),
            _ => side.is_none(),
        };
        if !ok {
            return Err(malformed(
                req,
                format!("side {:?} does not fit relation {}", side.map(Side::as_str), r.name()),
            ));
        }
        sides.push(side);
    }
    Ok(RelationMapping {
        relation_text,
        mapped_types,
        sides,
        anchor_category,
        other_categories,
        other_counts,
        none_reason: None,
    })
}

fn validate_oa_mapping(req: &JudgeRequest, raw: &Value) -> Result<ArchMapping, JudgeError> {
    let rel_v = ["relationship_type", "relationship_types"]
        .iter()
        .find_map(|k| raw.get(*k))
        .ok_or_else(|| malformed(req, "missing 'relationship_type'"))?;
    let rel_v = match rel_v {
        Value::Array(a) if a.len() == 1 => a[0].clone(),
        Value::Array(_) => return Err(malformed(req, "exactly one architecture relation expected")),
        other => other.clone(),
    };
    let why = reason(raw);
    if is_none_token(&rel_v) {
        if why.is_empty() {
            return Err(malformed(req, "'None' mapping without a reason"));
        }
        return Ok(ArchMapping {
            relation: None,
            element_type: None,
            specific_floors: Vec::new(),
            reason: why,
        });
    }
    let name = rel_v.as_str().unwrap_or_default();
    let relation =
        OARelation::parse(name).ok_or_else(|| malformed(req, format!("'{name}' is not a catalogue relation")))?;
    let element_type = match get_str(raw, &["architectural_element_type", "arch_element_type"]) {
        Some(s) => match ArchRef::parse(s) {
            ArchRef::RoomType(_) => return Err(malformed(req, format!("unknown element type '{s}'"))),
            r => Some(r),
        },
        None => None,
    };
    let offered: Vec<String> = req.payload["floor_ids"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
        .unwrap_or_default();
    let mut specific_floors = Vec::new();
    if let Some(list) = raw.get("specific_floors").and_then(Value::as_array) {
        for v in list {
            let id = v.as_str().unwrap_or_default();
            if !offered.iter().any(|o| o == id) {
                return Err(malformed(req, format!("floor '{id}' was not offered")));
            }
            specific_floors.push(id.to_string());
        }
    }
    Ok(ArchMapping {
        relation: Some(relation),
        element_type,
        specific_floors,
        reason: why,
    })
}
