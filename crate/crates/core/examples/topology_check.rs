//! Connectivity validation of a closed mesh and of the same mesh with a
//! hole punched in it.

use exactcsg::shapes::uv_sphere;
use exactcsg::topology::{check_topology, validate_mesh};

fn main() {
    let mut mesh = uv_sphere([0.0; 3], 1.0, 16, 8);
    let t = check_topology(&mesh.triangles);
    println!("sphere: components {}, chi {}, manifold {}", t.components, t.euler, t.manifold);
    println!("clean: {}", validate_mesh(&mesh, true).is_clean());

    mesh.triangles.truncate(mesh.triangles.len() - 3);
    let report = validate_mesh(&mesh, false);
    println!("after removing 3 triangles: {}", report.summary());
}
