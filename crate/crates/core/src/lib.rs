//! Scene evaluation toolkit: scores generated 3D indoor scenes against annotated
//! text constraints (object counts, attributes, object–object and object–architecture
//! relations) and against physical plausibility checks (collision, support,
//! navigability, accessibility, out-of-bounds).
//!
//! The geometric core is deterministic for a fixed seed; semantic questions go
//! through the pluggable [`judge::Judge`] interface.

pub mod annotation;
pub mod fixtures;
pub mod geometry;
pub mod judge;
pub mod metrics;
pub mod relations;
pub mod scene;
