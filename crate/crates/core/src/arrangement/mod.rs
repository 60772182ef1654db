//! Conforming arrangement of a labeled triangle soup.
//!
//! Every pair of intersecting triangles from different meshes contributes
//! points and segments to both triangles; each triangle is then
//! triangulated with those constraints and the pieces are glued together
//! with exact vertex identification.

mod assemble;
mod detect;
mod overlap;
mod soup;
mod triangulate;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::spatial::{Octree, DEFAULT_LEAF_CAPACITY, DEFAULT_MAX_DEPTH};

pub use assemble::{ArrangementMesh, NO_NEIGHBOR};
pub use detect::{
    candidate_pairs, detect_intersections, ConstraintSegment, Constraints, TriangleConstraints,
};
pub use soup::{preprocess, PreparedSoup, TriangleSoup};
pub use triangulate::{triangulate_constrained, LocalTriangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OctreeOptions {
    pub leaf_capacity: usize,
    pub max_depth: usize,
}

impl Default for OctreeOptions {
    fn default() -> Self {
        OctreeOptions {
            leaf_capacity: DEFAULT_LEAF_CAPACITY,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArrangementStats {
    pub candidate_pairs: usize,
    pub intersecting_pairs: usize,
    pub coplanar_pairs: usize,
    pub constraint_points: usize,
    pub constraint_segments: usize,
    pub split_triangles: usize,
    pub implicit_vertices: usize,
    pub merged_triangles: usize,
    pub output_triangles: usize,
    pub flagged_edges: usize,
    pub detect_seconds: f64,
    pub triangulate_seconds: f64,
    pub assemble_seconds: f64,
}

/// Arrangement together with the inputs the classifier needs.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub soup: PreparedSoup,
    pub octree: Octree,
    pub mesh: ArrangementMesh,
    pub stats: ArrangementStats,
}

pub fn build_octree(soup: &PreparedSoup, options: OctreeOptions) -> Octree {
    Octree::build(&soup.boxes, soup.scene_box, options.leaf_capacity, options.max_depth)
}

/// Triangulates every constrained triangle. Triangles without constraints
/// are not listed.
pub fn triangulate_all(
    soup: &PreparedSoup,
    constraints: &Constraints,
) -> Result<Vec<(u32, LocalTriangulation)>, Error> {
    let items: Vec<(&u32, &TriangleConstraints)> = constraints.by_triangle.iter().collect();
    items
        .par_iter()
        .map(|&(&t, c)| {
            let plane = &soup.planes[t as usize];
            triangulate_constrained(
                soup.corners(t as usize),
                &c.points,
                &c.segments,
                plane.normal_axis(),
                plane.normal_sign(),
            )
            .map(|lt| (t, lt))
        })
        .collect()
}

/// Runs detection, per-triangle triangulation and assembly.
pub fn arrange(soup: PreparedSoup, octree: Octree) -> Result<Arrangement, Error> {
    let t0 = Instant::now();
    let constraints = detect_intersections(&soup, &octree);
    let t1 = Instant::now();
    let items: Vec<(&u32, &TriangleConstraints)> = constraints.by_triangle.iter().collect();
    let pieces: Vec<(u32, overlap::Piece)> = items
        .par_iter()
        .map(|&(&t, c)| overlap::process_triangle(&soup, t as usize, c).map(|p| (t, p)))
        .collect::<Result<_, _>>()?;
    let t2 = Instant::now();
    let (mesh, counts) = assemble::assemble(&soup, &pieces)?;
    let t3 = Instant::now();
    let stats = ArrangementStats {
        candidate_pairs: constraints.candidate_pairs,
        intersecting_pairs: constraints.intersecting_pairs,
        coplanar_pairs: constraints.coplanar_pairs,
        constraint_points: constraints.point_count(),
        constraint_segments: constraints.segment_count(),
        split_triangles: pieces.len(),
        implicit_vertices: counts.implicit_vertices,
        merged_triangles: counts.merged_triangles,
        output_triangles: mesh.triangles.len(),
        flagged_edges: mesh.flagged_edge_count(),
        detect_seconds: (t1 - t0).as_secs_f64(),
        triangulate_seconds: (t2 - t1).as_secs_f64(),
        assemble_seconds: (t3 - t2).as_secs_f64(),
    };
    Ok(Arrangement {
        soup,
        octree,
        mesh,
        stats,
    })
}
