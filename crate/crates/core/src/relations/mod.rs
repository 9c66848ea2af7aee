//! Spatial relation scoring. Every scorer yields a value in [0, 1]; a relation holds
//! when the value reaches [`POSITIVE_THRESHOLD`].

mod catalog;
mod scoring;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    relation_table, OARelation, OORelation, RelationTableRow, ACROSS, AGAINST_WALL, CORNER_WALL, FACE_MAX_ANGLE_DEG,
    FAR, HANG_CEILING, MIDDLE_OF_SIGMA, MIDDLE_ROOM_MIN_SIGMA, NEAR, NEXT_TO, ON_WALL, PERPENDICULAR_DOT_TOL,
    SIDE_OF_EXTENSION,
};
pub use scoring::{
    box_samples, count_satisfied, face_falloff, middle_room_sigma, score_containment, score_distance_band,
    score_face, score_middle_of, score_oa, score_oo, score_room_relation, score_side_family, score_surround,
    score_wall_relation, side_axis, side_membership, surround_from_points, ArchTarget, ContainmentMode, RoomRelationKind,
    SampleContext, WallRelationKind,
};

pub const POSITIVE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("object '{0}' has no front vector")]
    NoFrontVector(String),
    #[error("surround needs at least 2 targets, got {0}")]
    TooFewTargets(usize),
    #[error("room '{0}' has fewer than two walls")]
    MissingWalls(String),
    #[error("relation {relation} does not apply to {target}")]
    KindMismatch { relation: String, target: String },
    #[error("side '{side}' is not valid for {relation}")]
    InvalidSide { relation: String, side: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationScore {
    pub value: f64,
    pub threshold: f64,
    pub positive: bool,
}

impl RelationScore {
    /// Clamps to [0, 1]; NaN becomes 0.
    pub fn new(value: f64) -> Self {
        let value = if value.is_nan() { 0.0 } else { value.clamp(0.0, 1.0) };
        Self {
            value,
            threshold: POSITIVE_THRESHOLD,
            positive: value >= POSITIVE_THRESHOLD,
        }
    }
}

/// Closed distance interval scoring 1, with Gaussian falloff of the distance to the
/// nearest edge outside it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceBand {
    pub lo: f64,
    #[serde(with = "infinite_as_null")]
    pub hi: f64,
    pub sigma: f64,
}

impl DistanceBand {
    pub const fn new(lo: f64, hi: f64, sigma: f64) -> Self {
        Self { lo, hi, sigma }
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Front,
    Back,
    Top,
    Bottom,
    Long,
    Short,
}

impl Side {
    pub const ALL: [Side; 8] = [
        Side::Left,
        Side::Right,
        Side::Front,
        Side::Back,
        Side::Top,
        Side::Bottom,
        Side::Long,
        Side::Short,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Front => "front",
            Side::Back => "back",
            Side::Top => "top",
            Side::Bottom => "bottom",
            Side::Long => "long",
            Side::Short => "short",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        let s = s.trim().to_lowercase();
        Side::ALL.into_iter().find(|x| x.as_str() == s)
    }

    pub fn is_lateral(self) -> bool {
        matches!(self, Side::Left | Side::Right | Side::Front | Side::Back)
    }

    pub fn mirrored(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            s => s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideMode {
    SideOf,
    SideRegion,
    OnTop,
    LongShort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideSpec {
    pub side: Side,
    pub mode: SideMode,
}

impl SideSpec {
    pub fn new(side: Side, mode: SideMode) -> Result<Self, RelationError> {
        let ok = match mode {
            SideMode::LongShort => matches!(side, Side::Long | Side::Short),
            SideMode::OnTop => side == Side::Top,
            SideMode::SideOf | SideMode::SideRegion => !matches!(side, Side::Long | Side::Short),
        };
        if !ok {
            return Err(RelationError::InvalidSide {
                relation: format!("{mode:?}"),
                side: side.as_str().into(),
            });
        }
        Ok(Self { side, mode })
    }

    /// Box growth factor applied before the side test.
    pub fn extension(&self) -> f64 {
        match self.mode {
            SideMode::SideOf | SideMode::LongShort => SIDE_OF_EXTENSION,
            SideMode::SideRegion | SideMode::OnTop => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurroundEvaluation {
    pub n: usize,
    /// Ideal angular spacing (rad).
    pub ideal_angle: f64,
    /// Mean 2D centroid distance to the anchor (m).
    pub mean_distance: f64,
    pub distance_deviations: Vec<f64>,
    pub angle_deviations: Vec<f64>,
    pub s: f64,
}
