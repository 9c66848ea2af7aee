use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

use super::{JudgeError, JudgeRequest, JudgeTask};

/// Template file names, one per task, as found in an override directory.
pub const PROMPT_FILES: [(JudgeTask, &str); 6] = [
    (JudgeTask::MatchCategory, "match_category.txt"),
    (JudgeTask::VerifyAttribute, "verify_attribute.txt"),
    (JudgeTask::SupportType, "support_type.txt"),
    (JudgeTask::FunctionalSides, "functional_sides.txt"),
    (JudgeTask::MapOoRelation, "map_oo_relation.txt"),
    (JudgeTask::MapOaRelation, "map_oa_relation.txt"),
];

fn builtin(task: JudgeTask) -> &'static str {
    match task {
        JudgeTask::MatchCategory => include_str!("../../assets/prompts/match_category.txt"),
        JudgeTask::VerifyAttribute => include_str!("../../assets/prompts/verify_attribute.txt"),
        JudgeTask::SupportType => include_str!("../../assets/prompts/support_type.txt"),
        JudgeTask::FunctionalSides => include_str!("../../assets/prompts/functional_sides.txt"),
        JudgeTask::MapOoRelation => include_str!("../../assets/prompts/map_oo_relation.txt"),
        JudgeTask::MapOaRelation => include_str!("../../assets/prompts/map_oa_relation.txt"),
    }
}

/// Prompt templates with `{{key}}` placeholders filled from the request payload.
#[derive(Clone, Debug)]
pub struct PromptSet {
    templates: HashMap<JudgeTask, String>,
}

impl Default for PromptSet {
    fn default() -> Self {
        Self {
            templates: JudgeTask::ALL.iter().map(|t| (*t, builtin(*t).to_string())).collect(),
        }
    }
}

impl PromptSet {
    /// Built-in templates, replaced by any same-named files in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, JudgeError> {
        let mut set = Self::default();
        for (task, file) in PROMPT_FILES {
            let p = dir.join(file);
            if p.is_file() {
                let text = std::fs::read_to_string(&p).map_err(|e| JudgeError::Io(format!("{}: {e}", p.display())))?;
                set.templates.insert(task, text);
            }
        }
        Ok(set)
    }

    pub fn template(&self, task: JudgeTask) -> &str {
        &self.templates[&task]
    }

    pub fn render(&self, request: &JudgeRequest) -> String {
        let mut out = self.template(request.task).to_string();
        if let Value::Object(map) = &request.payload {
            for (k, v) in map {
                let text = match v {
                    Value::String(s) => s.clone(),
                    Value::Array(a) => a
                        .iter()
                        .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                        .collect::<Vec<_>>()
                        .join(", "),
                    other => other.to_string(),
                };
                out = out.replace(&format!("{{{{{k}}}}}"), &text);
            }
        }
        out
    }
}
