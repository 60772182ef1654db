//! Writes a mesh in every supported format and reads it back.

use exactcsg::io::{self, MeshFormat};
use exactcsg::shapes::torus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = torus([0.0; 3], 1.0, 0.3, 24, 12);
    let dir = std::env::temp_dir();
    for ext in ["obj", "off", "stl"] {
        let path = dir.join(format!("exactcsg_torus.{ext}"));
        io::save(&path, &mesh, None)?;
        let back = io::load(&path)?;
        let format = MeshFormat::from_path(&path)?;
        // Binary STL stores single precision, so only the text formats are
        // expected to round-trip bit for bit.
        println!(
            "{format:?}: {} vertices, {} triangles, bit-exact: {}",
            back.vertices.len(),
            back.triangles.len(),
            back.vertices == mesh.vertices
        );
    }
    Ok(())
}
