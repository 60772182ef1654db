//! Per-run diagnostics with a stable JSON layout.

use serde::{Deserialize, Serialize};

use crate::arrangement::ArrangementStats;
use crate::classification::ClassifyStats;
use crate::kernel::stats::PredicateCounters;

/// Wall times in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub preprocess: f64,
    pub octree: f64,
    pub arrangement: f64,
    pub classification: f64,
    pub extraction: f64,
    pub snap: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierCounts {
    pub vertex_origin: usize,
    pub first_triangle: usize,
    pub later_triangle: usize,
    pub exact_rational: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub inputs: usize,
    pub triangles_in: usize,
    pub arrangement_triangles: usize,
    pub triangles_out: usize,
    pub vertices_out: usize,
    pub patches: usize,
    pub kept_patches: usize,
    pub rays: usize,
    pub skipped_pairs: usize,
    pub tiers: TierCounts,
    pub max_triangles_tried: usize,
    pub perturbations: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub op: String,
    pub threads: usize,
    pub times: StageTimes,
    pub counts: RunCounts,
    pub arrangement: ArrangementStats,
    pub classification: ClassifyStats,
    pub predicates: PredicateCounters,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
