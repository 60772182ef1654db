//! Flattened input triangles and their clean-up.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::Error;
use crate::kernel::{PlaneCache, Point3};
use crate::labels::{LabelSet, MAX_LABELS};
use crate::mesh::Mesh;
use crate::spatial::Aabb;

/// All input triangles in one array, each tagged with its mesh.
#[derive(Debug, Clone, Default)]
pub struct TriangleSoup {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
    pub origin: Vec<u32>,
    pub mesh_count: usize,
}

impl TriangleSoup {
    pub fn from_meshes<'a>(meshes: impl IntoIterator<Item = &'a Mesh>) -> TriangleSoup {
        let mut soup = TriangleSoup::default();
        for (i, m) in meshes.into_iter().enumerate() {
            let off = soup.vertices.len() as u32;
            soup.vertices.extend_from_slice(&m.vertices);
            soup.triangles
                .extend(m.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
            soup.origin.extend(std::iter::repeat(i as u32).take(m.triangles.len()));
            soup.mesh_count = i + 1;
        }
        soup
    }

    pub fn check(&self) -> Result<(), Error> {
        if self.mesh_count > MAX_LABELS {
            return Err(Error::InvalidInput(format!(
                "{} input meshes, at most {MAX_LABELS} are supported",
                self.mesh_count
            )));
        }
        if self.origin.len() != self.triangles.len() {
            return Err(Error::InvalidInput("origin tags do not match triangles".into()));
        }
        let n = self.vertices.len();
        if self.triangles.iter().flatten().any(|&v| v as usize >= n) {
            return Err(Error::InvalidInput("triangle references a missing vertex".into()));
        }
        if self.origin.iter().any(|&o| o as usize >= self.mesh_count) {
            return Err(Error::InvalidInput("origin tag out of range".into()));
        }
        if let Some(v) = self.vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("vertex {v} has a non-finite coordinate")));
        }
        Ok(())
    }
}

/// Soup after removal of degenerate and duplicated triangles.
///
/// Equal vertices are merged, so coincident triangles of different meshes
/// share vertex ids. `flips[t]` holds the meshes whose copy of triangle `t`
/// has the opposite winding of the stored one.
#[derive(Debug, Clone)]
pub struct PreparedSoup {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
    pub labels: Vec<LabelSet>,
    pub flips: Vec<LabelSet>,
    pub planes: Vec<PlaneCache>,
    pub boxes: Vec<Aabb>,
    pub mesh_count: usize,
    pub mesh_boxes: Vec<Aabb>,
    pub scene_box: Aabb,
    pub removed_degenerate: usize,
    pub removed_duplicate: usize,
}

impl PreparedSoup {
    #[inline]
    pub fn corners(&self, t: usize) -> [Point3; 3] {
        self.triangles[t].map(|v| self.vertices[v as usize])
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
}

fn same_winding(a: &[u32; 3], b: &[u32; 3]) -> bool {
    let i = b.iter().position(|&v| v == a[0]).unwrap_or(0);
    b[(i + 1) % 3] == a[1]
}

/// Merges equal vertices, drops triangles with repeated or collinear
/// corners, and collapses triangles with equal vertex sets. Duplicates
/// within one mesh keep the first copy; across meshes their labels merge.
pub fn preprocess(soup: &TriangleSoup) -> Result<PreparedSoup, Error> {
    soup.check()?;

    let mut remap = vec![u32::MAX; soup.vertices.len()];
    let mut vertices = Vec::new();
    let mut seen: HashMap<[u64; 3], u32> = HashMap::with_capacity(soup.vertices.len());
    for &v in soup.triangles.iter().flatten() {
        if remap[v as usize] != u32::MAX {
            continue;
        }
        let p = soup.vertices[v as usize];
        let id = *seen.entry(p.key()).or_insert_with(|| {
            vertices.push(p);
            (vertices.len() - 1) as u32
        });
        remap[v as usize] = id;
    }

    let tris: Vec<[u32; 3]> = soup
        .triangles
        .iter()
        .map(|t| t.map(|v| remap[v as usize]))
        .collect();
    let planes: Vec<Option<PlaneCache>> = tris
        .par_iter()
        .map(|t| {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return None;
            }
            let c = PlaneCache::new(
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            (!c.is_degenerate()).then_some(c)
        })
        .collect();

    let mut out_tris = Vec::new();
    let mut labels: Vec<LabelSet> = Vec::new();
    let mut flips: Vec<LabelSet> = Vec::new();
    let mut out_planes = Vec::new();
    let mut by_set: HashMap<[u32; 3], u32> = HashMap::new();
    let (mut removed_degenerate, mut removed_duplicate) = (0, 0);
    for (i, (t, plane)) in tris.iter().zip(planes).enumerate() {
        let Some(plane) = plane else {
            removed_degenerate += 1;
            continue;
        };
        let mesh = soup.origin[i] as usize;
        let mut key = *t;
        key.sort_unstable();
        if let Some(&j) = by_set.get(&key) {
            let j = j as usize;
            removed_duplicate += 1;
            if !labels[j].contains(mesh) {
                labels[j].insert(mesh);
                if !same_winding(&out_tris[j], t) {
                    flips[j].insert(mesh);
                }
            }
            continue;
        }
        by_set.insert(key, out_tris.len() as u32);
        out_tris.push(*t);
        labels.push(LabelSet::single(mesh));
        flips.push(LabelSet::new());
        out_planes.push(plane);
    }
    if out_tris.is_empty() {
        return Err(Error::EmptyInput);
    }

    let boxes: Vec<Aabb> = out_tris
        .iter()
        .map(|t| Aabb::from_points(t.iter().map(|&v| &vertices[v as usize])))
        .collect();
    let mut mesh_boxes = vec![Aabb::EMPTY; soup.mesh_count];
    for (b, l) in boxes.iter().zip(&labels) {
        for m in l.iter() {
            mesh_boxes[m] = mesh_boxes[m].union(b);
        }
    }
    let scene_box = boxes.iter().fold(Aabb::EMPTY, |acc, b| acc.union(b));

    Ok(PreparedSoup {
        vertices,
        triangles: out_tris,
        labels,
        flips,
        planes: out_planes,
        boxes,
        mesh_count: soup.mesh_count,
        mesh_boxes,
        scene_box,
        removed_degenerate,
        removed_duplicate,
    })
}
