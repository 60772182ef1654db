//! Resolves all intersections between two meshes into one conforming
//! triangle mesh and prints what was found.

use exactcsg::arrangement::{arrange, build_octree, preprocess, OctreeOptions, TriangleSoup};
use exactcsg::shapes::{cube, uv_sphere};

fn main() -> Result<(), exactcsg::Error> {
    let meshes = [cube([-0.5; 3], 1.0), uv_sphere([0.4, 0.3, 0.2], 0.6, 24, 12)];
    let soup = TriangleSoup::from_meshes(&meshes);
    let prepared = preprocess(&soup)?;
    let octree = build_octree(&prepared, OctreeOptions::default());
    let arr = arrange(prepared, octree)?;
    let s = &arr.stats;
    println!("input triangles:      {}", meshes.iter().map(|m| m.triangles.len()).sum::<usize>());
    println!("candidate pairs:      {}", s.candidate_pairs);
    println!("intersecting pairs:   {}", s.intersecting_pairs);
    println!("split triangles:      {}", s.split_triangles);
    println!("implicit vertices:    {}", s.implicit_vertices);
    println!("arrangement triangles {}", arr.mesh.triangles.len());
    Ok(())
}
