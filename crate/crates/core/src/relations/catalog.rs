use serde::{Deserialize, Serialize};

use super::{DistanceBand, POSITIVE_THRESHOLD};

pub const NEXT_TO: DistanceBand = DistanceBand::new(0.0, 0.5, 0.25);
pub const NEAR: DistanceBand = DistanceBand::new(0.5, 1.5, 0.25);
pub const ACROSS: DistanceBand = DistanceBand::new(1.5, 4.0, 0.25);
pub const FAR: DistanceBand = DistanceBand::new(4.0, f64::INFINITY, 0.25);
pub const CORNER_WALL: DistanceBand = DistanceBand::new(0.0, 0.8, 0.25);
pub const ON_WALL: DistanceBand = DistanceBand::new(0.0, 0.01, 0.01);
pub const AGAINST_WALL: DistanceBand = DistanceBand::new(0.0, 0.3, 0.1);
pub const HANG_CEILING: DistanceBand = DistanceBand::new(0.0, 0.01, 0.03);

/// Fractional growth of the anchor box for side tests (each dimension).
pub const SIDE_OF_EXTENSION: f64 = 0.25;
pub const MIDDLE_OF_SIGMA: f64 = 0.25;
/// Lower clamp for the room-size-dependent middle-of-room sigma (m).
pub const MIDDLE_ROOM_MIN_SIGMA: f64 = 0.05;
pub const FACE_MAX_ANGLE_DEG: f64 = 30.0;
/// Walls count as perpendicular when |n₁·n₂| is at most this.
pub const PERPENDICULAR_DOT_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OORelation {
    Inside,
    Outside,
    Face,
    SideOf,
    SideRegion,
    LongShortSide,
    OnTop,
    Middle,
    Surround,
    NextTo,
    Near,
    Across,
    Far,
}

impl OORelation {
    pub const ALL: [OORelation; 13] = [
        OORelation::Inside,
        OORelation::Outside,
        OORelation::Face,
        OORelation::SideOf,
        OORelation::SideRegion,
        OORelation::LongShortSide,
        OORelation::OnTop,
        OORelation::Middle,
        OORelation::Surround,
        OORelation::NextTo,
        OORelation::Near,
        OORelation::Across,
        OORelation::Far,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OORelation::Inside => "inside",
            OORelation::Outside => "outside",
            OORelation::Face => "face",
            OORelation::SideOf => "side_of",
            OORelation::SideRegion => "side_region",
            OORelation::LongShortSide => "long_short_side",
            OORelation::OnTop => "on_top",
            OORelation::Middle => "middle",
            OORelation::Surround => "surround",
            OORelation::NextTo => "next_to",
            OORelation::Near => "near",
            OORelation::Across => "across",
            OORelation::Far => "far",
        }
    }

    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            OORelation::Inside => &["inside_of"],
            OORelation::Outside => &["outside_of"],
            OORelation::Face => &["face_to", "facing"],
            OORelation::LongShortSide => &["long_short_side_of"],
            OORelation::Middle => &["middle_of"],
            OORelation::Across => &["across_from"],
            _ => &[],
        }
    }

    /// Looks up a canonical name or alias.
    pub fn parse(s: &str) -> Option<OORelation> {
        let s = s.trim().to_lowercase();
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s || r.aliases().contains(&s.as_str()))
    }

    pub fn band(self) -> Option<DistanceBand> {
        match self {
            OORelation::NextTo => Some(NEXT_TO),
            OORelation::Near => Some(NEAR),
            OORelation::Across => Some(ACROSS),
            OORelation::Far => Some(FAR),
            _ => None,
        }
    }

    pub fn needs_side(self) -> bool {
        matches!(self, OORelation::SideOf | OORelation::SideRegion | OORelation::LongShortSide)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OARelation {
    NextTo,
    Near,
    Across,
    Far,
    InsideRoom,
    MiddleRoom,
    CornerRoom,
    OnWall,
    AgainstWall,
    HangCeiling,
}

impl OARelation {
    pub const ALL: [OARelation; 10] = [
        OARelation::NextTo,
        OARelation::Near,
        OARelation::Across,
        OARelation::Far,
        OARelation::InsideRoom,
        OARelation::MiddleRoom,
        OARelation::CornerRoom,
        OARelation::OnWall,
        OARelation::AgainstWall,
        OARelation::HangCeiling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OARelation::NextTo => "next_to",
            OARelation::Near => "near",
            OARelation::Across => "across",
            OARelation::Far => "far",
            OARelation::InsideRoom => "inside_room",
            OARelation::MiddleRoom => "middle_room",
            OARelation::CornerRoom => "corner_room",
            OARelation::OnWall => "on_wall",
            OARelation::AgainstWall => "against_wall",
            OARelation::HangCeiling => "hang_ceiling",
        }
    }

    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            OARelation::Across => &["across_from"],
            OARelation::MiddleRoom => &["middle_of_room"],
            OARelation::CornerRoom => &["corner_of_room"],
            OARelation::HangCeiling => &["hang_from_ceiling"],
            _ => &[],
        }
    }

    pub fn parse(s: &str) -> Option<OARelation> {
        let s = s.trim().to_lowercase();
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s || r.aliases().contains(&s.as_str()))
    }

    pub fn band(self) -> Option<DistanceBand> {
        match self {
            OARelation::NextTo => Some(NEXT_TO),
            OARelation::Near => Some(NEAR),
            OARelation::Across => Some(ACROSS),
            OARelation::Far => Some(FAR),
            OARelation::CornerRoom => Some(CORNER_WALL),
            OARelation::OnWall => Some(ON_WALL),
            OARelation::AgainstWall => Some(AGAINST_WALL),
            OARelation::HangCeiling => Some(HANG_CEILING),
            OARelation::InsideRoom | OARelation::MiddleRoom => None,
        }
    }
}

/// One row of the exported relation constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationTableRow {
    pub family: String,
    pub name: String,
    pub aliases: Vec<String>,
    pub band: Option<DistanceBand>,
    pub sigma: Option<f64>,
    pub extension: Option<f64>,
    pub max_angle_deg: Option<f64>,
    pub needs_side: bool,
    pub threshold: f64,
}

/// All 23 relations with their constants, object–object first.
pub fn relation_table() -> Vec<RelationTableRow> {
    let row = |family: &str, name: &str, aliases: &[&str]| RelationTableRow {
        family: family.into(),
        name: name.into(),
        aliases: aliases.iter().map(|s| s.to_string()).collect(),
        band: None,
        sigma: None,
        extension: None,
        max_angle_deg: None,
        needs_side: false,
        threshold: POSITIVE_THRESHOLD,
    };
    let mut out = Vec::new();
    for r in OORelation::ALL {
        let mut x = row("object_object", r.name(), r.aliases());
        x.band = r.band();
        x.needs_side = r.needs_side();
        match r {
            OORelation::SideOf | OORelation::LongShortSide => x.extension = Some(SIDE_OF_EXTENSION),
            OORelation::SideRegion | OORelation::OnTop => x.extension = Some(0.0),
            OORelation::Middle => x.sigma = Some(MIDDLE_OF_SIGMA),
            OORelation::Face => x.max_angle_deg = Some(FACE_MAX_ANGLE_DEG),
            _ => {}
        }
        out.push(x);
    }
    for r in OARelation::ALL {
        let mut x = row("object_architecture", r.name(), r.aliases());
        x.band = r.band();
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_aliases_resolve() {
        for r in OORelation::ALL {
            assert_eq!(OORelation::parse(r.name()), Some(r));
            for a in r.aliases() {
                assert_eq!(OORelation::parse(a), Some(r));
            }
        }
        for r in OARelation::ALL {
            assert_eq!(OARelation::parse(r.name()), Some(r));
        }
        assert_eq!(OARelation::parse("corner_of_room"), Some(OARelation::CornerRoom));
        assert_eq!(OORelation::parse("diagonal"), None);
    }

    #[test]
    fn table_has_every_relation() {
        let t = relation_table();
        assert_eq!(t.len(), 23);
        let json = serde_json::to_string(&t).unwrap();
        let back: Vec<RelationTableRow> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(back.iter().any(|r| r.name == "far" && r.band.unwrap().hi.is_infinite()));
    }
}
