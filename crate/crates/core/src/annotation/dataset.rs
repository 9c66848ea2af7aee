use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    parse_spec_line, AnnotationError, AttributeSpec, CountSpec, FieldKind, OARelationSpec, OORelationSpec, SpecLine,
};

/// Per-entry annotation files, in field order.
pub const SPEC_FILES: [(FieldKind, &str); 4] = [
    (FieldKind::Count, "counts.csv"),
    (FieldKind::Attribute, "attributes.csv"),
    (FieldKind::Oo, "oo_relations.csv"),
    (FieldKind::Oa, "oa_relations.csv"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

impl FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Difficulty::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown difficulty '{s}'"))
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    pub difficulty: Difficulty,
    pub description: String,
    pub counts: Vec<CountSpec>,
    pub attributes: Vec<AttributeSpec>,
    pub oo_relations: Vec<OORelationSpec>,
    pub oa_relations: Vec<OARelationSpec>,
}

impl DatasetEntry {
    pub fn count_categories(&self) -> BTreeSet<&str> {
        self.counts.iter().map(|c| c.category.as_str()).collect()
    }

    /// Categories used by attribute or relation specs that no count spec lists.
    pub fn unlisted_categories(&self) -> Vec<String> {
        let listed = self.count_categories();
        let mut used: Vec<String> = Vec::new();
        used.extend(self.attributes.iter().map(|a| a.category.clone()));
        for r in &self.oo_relations {
            used.extend(r.category_names());
        }
        used.extend(self.oa_relations.iter().map(|r| r.category.clone()));
        let mut out: Vec<String> = used.into_iter().filter(|c| !listed.contains(c.as_str())).collect();
        out.sort();
        out.dedup();
        out
    }

    /// All spec lines in file order, each paired with its field kind.
    pub fn spec_lines(&self) -> Vec<(FieldKind, String)> {
        let mut out = Vec::new();
        out.extend(self.counts.iter().map(|s| (FieldKind::Count, s.to_string())));
        out.extend(self.attributes.iter().map(|s| (FieldKind::Attribute, s.to_string())));
        out.extend(self.oo_relations.iter().map(|s| (FieldKind::Oo, s.to_string())));
        out.extend(self.oa_relations.iter().map(|s| (FieldKind::Oa, s.to_string())));
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct LoadedDataset {
    /// Sorted by difficulty, then id.
    pub entries: Vec<DatasetEntry>,
    pub warnings: Vec<String>,
}

impl LoadedDataset {
    pub fn count_by_difficulty(&self, d: Difficulty) -> usize {
        self.entries.iter().filter(|e| e.difficulty == d).count()
    }

    pub fn get(&self, id: &str) -> Option<&DatasetEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn io(path: &Path, e: impl fmt::Display) -> AnnotationError {
    AnnotationError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn load_entry(dir: &Path, id: &str, difficulty: Difficulty) -> Result<DatasetEntry, AnnotationError> {
    let desc_path = dir.join("description.txt");
    let description = std::fs::read_to_string(&desc_path).map_err(|e| io(&desc_path, e))?;
    let mut entry = DatasetEntry {
        id: id.to_string(),
        difficulty,
        description: description.trim().to_string(),
        counts: Vec::new(),
        attributes: Vec::new(),
        oo_relations: Vec::new(),
        oa_relations: Vec::new(),
    };
    for (kind, file) in SPEC_FILES {
        let path = dir.join(file);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(io(&path, e)),
        };
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let spec = parse_spec_line(kind, line).map_err(|e| AnnotationError::AtLine {
                entry: id.to_string(),
                file: file.to_string(),
                line: n + 1,
                source: Box::new(e),
            })?;
            match spec {
                SpecLine::Count(s) => entry.counts.push(s),
                SpecLine::Attribute(s) => entry.attributes.push(s),
                SpecLine::Oo(s) => entry.oo_relations.push(s),
                SpecLine::Oa(s) => entry.oa_relations.push(s),
            }
        }
    }
    Ok(entry)
}

/// Loads `root/<difficulty>/<entry id>/` directories. Each holds `description.txt`
/// and optional `counts.csv`, `attributes.csv`, `oo_relations.csv`, `oa_relations.csv`
/// with one spec per line. Categories missing from the counts produce warnings.
pub fn load_dataset(root: &Path) -> Result<LoadedDataset, AnnotationError> {
    if !root.is_dir() {
        return Err(io(root, "dataset root is not a directory"));
    }
    let mut out = LoadedDataset::default();
    for difficulty in Difficulty::ALL {
        let dir = root.join(difficulty.as_str());
        if !dir.is_dir() {
            continue;
        }
        let mut ids: Vec<String> = std::fs::read_dir(&dir)
            .map_err(|e| io(&dir, e))?
            .filter_map(Result::ok)
            .filter(|e| e.path().is_dir())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        ids.sort();
        for id in ids {
            let entry = load_entry(&dir.join(&id), &id, difficulty)?;
            for c in entry.unlisted_categories() {
                let msg = format!("{id}: category '{c}' is not listed in the object counts");
                log::warn!("{msg}");
                out.warnings.push(msg);
            }
            out.entries.push(entry);
        }
    }
    Ok(out)
}

/// A spec line whose parsed form serializes to different text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTripMismatch {
    pub entry: String,
    pub file: String,
    pub line: usize,
    pub original: String,
    pub serialized: String,
}

/// Re-reads every spec file under `root` and compares each non-blank line with the
/// serialization of its parse.
pub fn check_round_trip(root: &Path, dataset: &LoadedDataset) -> Result<Vec<RoundTripMismatch>, AnnotationError> {
    let mut out = Vec::new();
    for entry in &dataset.entries {
        let dir = root.join(entry.difficulty.as_str()).join(&entry.id);
        for (kind, file) in SPEC_FILES {
            let path = dir.join(file);
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
                Err(e) => return Err(io(&path, e)),
            };
            for (n, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let serialized = parse_spec_line(kind, line)?.to_string();
                if serialized != line {
                    out.push(RoundTripMismatch {
                        entry: entry.id.clone(),
                        file: file.to_string(),
                        line: n + 1,
                        original: line.to_string(),
                        serialized,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_entry(root: &Path, diff: &str, id: &str, files: &[(&str, &str)]) {
        let dir = root.join(diff).join(id);
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("description.txt"), "A room.\n").unwrap();
        for (name, text) in files {
            std::fs::write(dir.join(name), text).unwrap();
        }
    }

    #[test]
    fn loads_and_warns_on_unlisted_category() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(
            dir.path(),
            "easy",
            "e1",
            &[("counts.csv", "eq,1,bed\n"), ("attributes.csv", "eq,1,sofa,red\n")],
        );
        write_entry(dir.path(), "hard", "h1", &[("counts.csv", "eq,1,bed\n\n")]);
        let ds = load_dataset(dir.path()).unwrap();
        assert_eq!(ds.entries.len(), 2);
        assert_eq!(ds.count_by_difficulty(Difficulty::Easy), 1);
        assert_eq!(ds.count_by_difficulty(Difficulty::Hard), 1);
        assert_eq!(ds.warnings.len(), 1);
        assert!(ds.warnings[0].contains("sofa"));
        assert_eq!(ds.get("e1").unwrap().attributes.len(), 1);
        assert!(check_round_trip(dir.path(), &ds).unwrap().is_empty());
    }

    #[test]
    fn padded_lines_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(dir.path(), "easy", "e1", &[("counts.csv", "eq,1,bed\neq, 2,chair\n")]);
        let ds = load_dataset(dir.path()).unwrap();
        let m = check_round_trip(dir.path(), &ds).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].line, m[0].serialized.as_str()), (2, "eq,2,chair"));
    }

    #[test]
    fn parse_error_names_entry_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_entry(dir.path(), "medium", "m1", &[("counts.csv", "eq,1,bed\nzz,2,chair\n")]);
        let err = load_dataset(dir.path()).unwrap_err();
        match err {
            AnnotationError::AtLine { entry, line, file, .. } => {
                assert_eq!((entry.as_str(), line, file.as_str()), ("m1", 2, "counts.csv"));
            }
            other => panic!("{other:?}"),
        }
    }
}
