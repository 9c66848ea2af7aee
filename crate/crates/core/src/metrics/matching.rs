use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::annotation::DatasetEntry;
use crate::judge::{Judge, JudgeRequest, JudgeResponse};
use crate::scene::SceneInstance;

/// Object ids per annotated category, plus the objects no category claimed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryAssignment {
    pub by_category: BTreeMap<String, Vec<String>>,
    pub unmatched_objects: Vec<String>,
}

impl CategoryAssignment {
    pub fn instances(&self, category: &str) -> &[String] {
        self.by_category.get(category).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn category_of(&self, object_id: &str) -> Option<&str> {
        self.by_category
            .iter()
            .find(|(_, ids)| ids.iter().any(|i| i == object_id))
            .map(|(c, _)| c.as_str())
    }
}

/// Categories offered to the matcher: count categories in file order, then any
/// category used elsewhere in the entry.
pub fn entry_categories(entry: &DatasetEntry) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in entry.counts.iter().map(|c| c.category.clone()).chain(entry.unlisted_categories()) {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// One judge call per object against the full category list.
pub fn match_objects(
    scene: &SceneInstance,
    categories: &[String],
    judge: &dyn Judge,
) -> Result<CategoryAssignment, MetricError> {
    let mut out = CategoryAssignment {
        by_category: categories.iter().map(|c| (c.clone(), Vec::new())).collect(),
        unmatched_objects: Vec::new(),
    };
    for obj in &scene.objects {
        if categories.is_empty() {
            out.unmatched_objects.push(obj.id.clone());
            continue;
        }
        let resp = judge
            .judge(&JudgeRequest::match_category(obj, categories))
            .map_err(|source| MetricError::judge(format!("matching object '{}'", obj.id), source))?;
        match resp {
            JudgeResponse::Match(m) => match m.matched_category {
                Some(c) => out.by_category.entry(c).or_default().push(obj.id.clone()),
                None => out.unmatched_objects.push(obj.id.clone()),
            },
            other => return Err(MetricError::unexpected("match_category", &other)),
        }
    }
    Ok(out)
}
