//! Splits an arrangement into patches and reports, for each patch, which
//! input solids contain it.

use exactcsg::arrangement::{arrange, build_octree, preprocess, OctreeOptions, TriangleSoup};
use exactcsg::classification::{classify_patches, extract_patches, ClassifyOptions};
use exactcsg::shapes::{torus, uv_sphere};

fn main() -> Result<(), exactcsg::Error> {
    let meshes = [torus([0.0; 3], 1.0, 0.35, 48, 24), uv_sphere([1.0, 0.0, 0.0], 0.5, 24, 12)];
    let soup = TriangleSoup::from_meshes(&meshes);
    let prepared = preprocess(&soup)?;
    let octree = build_octree(&prepared, OctreeOptions::default());
    let arr = arrange(prepared, octree)?;
    let patches = extract_patches(&arr.mesh);
    let (classified, stats) = classify_patches(&arr, &patches, ClassifyOptions::default())?;
    for cp in &classified {
        println!(
            "patch of {:>5} triangles on {:?}: inside {:?} ({:?})",
            cp.patch.triangles.len(),
            cp.patch.owners,
            cp.inside,
            cp.tier
        );
    }
    println!("rays cast: {}, perturbations: {}", stats.rays, stats.perturbations);
    Ok(())
}
