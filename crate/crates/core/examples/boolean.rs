//! All three operators on a posed cube and sphere, written as OBJ files
//! into the system temp directory.

use exactcsg::shapes::{cube, uv_sphere};
use exactcsg::topology::check_topology;
use exactcsg::{boolean, io, BooleanOp, BooleanOptions, RigidTransform};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = RigidTransform::from_axis_angle([1.0, 1.0, 0.0], 0.6, [0.1, 0.0, 0.0]);
    let meshes = [cube([-0.5; 3], 1.0).transformed(&pose), uv_sphere([0.3, 0.3, 0.3], 0.55, 32, 16)];
    for op in BooleanOp::ALL {
        let r = boolean(&meshes, op, &BooleanOptions::default())?;
        let t = check_topology(&r.triangles);
        let path = std::env::temp_dir().join(format!("exactcsg_{op}.obj"));
        io::save(&path, &r.mesh(), Some(&r.labels))?;
        println!(
            "{:<9} {:>5} triangles, {} component(s), chi {}, {:.1} ms -> {}",
            op.to_string(),
            r.triangles.len(),
            t.components,
            t.euler,
            r.report.times.total * 1e3,
            path.display()
        );
    }
    Ok(())
}
