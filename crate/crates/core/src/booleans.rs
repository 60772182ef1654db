//! Patch selection, stitching, snapping and the end-to-end façade.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arrangement::{
    arrange, build_octree, preprocess, ArrangementMesh, OctreeOptions, TriangleSoup,
};
use crate::classification::{classify_patches, extract_patches, ClassifiedPatch, ClassifyOptions};
use crate::error::Error;
use crate::kernel::{compare_lex, orient2d, stats, GenericPoint, Point3};
use crate::labels::LabelSet;
use crate::mesh::Mesh;
use crate::report::{RunCounts, RunReport, StageTimes, TierCounts};
use crate::topology::{check_topology, find_self_intersections, validate_mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BooleanOp {
    Union,
    Intersection,
    /// First input minus the union of the others.
    Subtraction,
}

impl BooleanOp {
    pub const ALL: [BooleanOp; 3] = [BooleanOp::Union, BooleanOp::Intersection, BooleanOp::Subtraction];

    /// Whether a point with the given per-mesh membership is in the result.
    pub fn eval(self, inside: impl IntoIterator<Item = bool>) -> bool {
        let mut it = inside.into_iter();
        match self {
            BooleanOp::Union => it.any(|b| b),
            BooleanOp::Intersection => it.all(|b| b),
            BooleanOp::Subtraction => it.next().unwrap_or(false) && !it.any(|b| b),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            BooleanOp::Union => 0,
            BooleanOp::Intersection => 1,
            BooleanOp::Subtraction => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<BooleanOp> {
        BooleanOp::ALL.get(tag as usize).copied()
    }
}

impl fmt::Display for BooleanOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BooleanOp::Union => "union",
            BooleanOp::Intersection => "intersect",
            BooleanOp::Subtraction => "subtract",
        })
    }
}

impl FromStr for BooleanOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "union" => Ok(BooleanOp::Union),
            "intersect" | "intersection" => Ok(BooleanOp::Intersection),
            "subtract" | "subtraction" | "difference" => Ok(BooleanOp::Subtraction),
            other => Err(Error::InvalidInput(format!("unknown operator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BooleanOptions {
    pub classify: ClassifyOptions,
    pub octree: OctreeOptions,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Reject inputs that are not closed oriented 2-manifolds.
    pub validate_input: bool,
    /// With `validate_input`, also scan each input for self-intersections.
    pub validate_self_intersections: bool,
    /// Scan the snapped output for new self-intersections.
    pub audit_intersections: bool,
}

impl Default for BooleanOptions {
    fn default() -> Self {
        BooleanOptions {
            classify: ClassifyOptions::default(),
            octree: OctreeOptions::default(),
            threads: None,
            validate_input: false,
            validate_self_intersections: false,
            audit_intersections: false,
        }
    }
}

/// Arrangement triangle chosen for the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeptTriangle {
    pub triangle: u32,
    /// Winding must be reversed so the normal points out of the result.
    pub reversed: bool,
}

/// Output before snapping: exact vertices, canonical order.
#[derive(Debug, Clone)]
pub struct ExactResult {
    pub vertices: Vec<GenericPoint>,
    pub triangles: Vec<[u32; 3]>,
    pub labels: Vec<LabelSet>,
}

#[derive(Debug, Clone)]
pub struct BooleanResult {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
    /// Input meshes each output triangle comes from.
    pub labels: Vec<LabelSet>,
    /// Unrounded positions, index-aligned with `vertices`.
    pub exact_vertices: Vec<GenericPoint>,
    pub report: RunReport,
}

impl BooleanResult {
    pub fn mesh(&self) -> Mesh {
        Mesh::new(self.vertices.clone(), self.triangles.clone())
    }
}

/// Membership of the two sides of a triangle with respect to every input.
///
/// An owner's stored winding faces out of it unless the mesh is listed in
/// `flips`; a non-owner sees both sides the same way.
fn side_membership<'a>(
    owners: &'a LabelSet,
    flips: &'a LabelSet,
    inside: &'a LabelSet,
    n: usize,
    front: bool,
) -> impl Iterator<Item = bool> + 'a {
    (0..n).map(move |m| {
        if owners.contains(m) {
            flips.contains(m) == front
        } else {
            inside.contains(m)
        }
    })
}

/// Picks the arrangement triangles bounding the result of `op`.
///
/// A triangle survives when the result differs on its two sides, which
/// also settles coincident patches: same-facing copies collapse to one
/// surface and opposite-facing copies cancel whenever the operator merges
/// the volumes they separate.
pub fn select_patches(
    mesh: &ArrangementMesh,
    classified: &[ClassifiedPatch],
    op: BooleanOp,
) -> Vec<KeptTriangle> {
    let n = mesh.mesh_count;
    let mut kept = Vec::new();
    for cp in classified {
        for &t in &cp.patch.triangles {
            let owners = &mesh.labels[t as usize];
            let flips = &mesh.flips[t as usize];
            let front = op.eval(side_membership(owners, flips, &cp.inside, n, true));
            let back = op.eval(side_membership(owners, flips, &cp.inside, n, false));
            if front != back {
                kept.push(KeptTriangle {
                    triangle: t,
                    reversed: front,
                });
            }
        }
    }
    kept.sort_unstable_by_key(|k| k.triangle);
    kept
}

/// Builds the output complex from the kept triangles and checks it closes.
pub fn stitch(mesh: &ArrangementMesh, kept: &[KeptTriangle]) -> Result<ExactResult, Error> {
    let mut tris: Vec<[u32; 3]> = Vec::with_capacity(kept.len());
    let mut labels = Vec::with_capacity(kept.len());
    for k in kept {
        let [a, b, c] = mesh.triangles[k.triangle as usize];
        tris.push(if k.reversed { [a, c, b] } else { [a, b, c] });
        labels.push(mesh.labels[k.triangle as usize].clone());
    }

    let mut balance: HashMap<(u32, u32), i64> = HashMap::new();
    for t in &tris {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            let (key, d) = if a < b { ((a, b), 1) } else { ((b, a), -1) };
            *balance.entry(key).or_insert(0) += d;
        }
    }
    let open: i64 = balance.values().map(|v| v.abs()).sum();
    if open != 0 {
        return Err(Error::OpenBoundary(open as usize));
    }

    // Canonical vertex order: rounded lexicographic, exact on ties.
    let mut used: Vec<u32> = tris.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let snapped: HashMap<u32, Point3> = used
        .iter()
        .map(|&v| (v, mesh.vertices[v as usize].approximate()))
        .collect();
    used.sort_by(|&a, &b| {
        snapped[&a]
            .lex_cmp(&snapped[&b])
            .then_with(|| compare_lex(&mesh.vertices[a as usize], &mesh.vertices[b as usize]))
    });
    let mut remap = HashMap::with_capacity(used.len());
    for (i, &v) in used.iter().enumerate() {
        remap.insert(v, i as u32);
    }
    let vertices: Vec<GenericPoint> = used.iter().map(|&v| mesh.vertices[v as usize].clone()).collect();

    let mut faces: Vec<([u32; 3], LabelSet)> = tris
        .iter()
        .zip(labels)
        .map(|(t, l)| (rotate_min_first(t.map(|v| remap[&v])), l))
        .collect();
    faces.sort();
    let (triangles, labels) = faces.into_iter().unzip();
    Ok(ExactResult {
        vertices,
        triangles,
        labels,
    })
}

fn rotate_min_first(t: [u32; 3]) -> [u32; 3] {
    let i = (0..3).min_by_key(|&i| t[i]).unwrap_or(0);
    [t[i], t[(i + 1) % 3], t[(i + 2) % 3]]
}

/// Rounds every vertex and reports defects the rounding introduced.
pub fn snap(exact: &ExactResult, audit_intersections: bool) -> (Vec<Point3>, Vec<String>) {
    let vertices: Vec<Point3> = exact.vertices.iter().map(|p| p.approximate()).collect();
    let mut warnings = Vec::new();

    let mut seen: HashMap<[u64; 3], u32> = HashMap::with_capacity(vertices.len());
    let mut collapsed = 0usize;
    for (i, p) in vertices.iter().enumerate() {
        if seen.insert(p.key(), i as u32).is_some() {
            collapsed += 1;
        }
    }
    if collapsed > 0 {
        warnings.push(format!("snap: {collapsed} vertices rounded onto another vertex"));
    }

    let degenerate = exact
        .triangles
        .iter()
        .filter(|t| is_degenerate(t.map(|v| vertices[v as usize])))
        .count();
    if degenerate > 0 {
        warnings.push(format!("snap: {degenerate} triangles became degenerate"));
    }

    if audit_intersections {
        let pairs = find_self_intersections(&vertices, &exact.triangles);
        if !pairs.is_empty() {
            warnings.push(format!(
                "snap: {} intersecting triangle pairs after rounding",
                pairs.len()
            ));
        }
    }
    (vertices, warnings)
}

/// Exact collinearity test: a triangle is flat when all three axis
/// projections are.
fn is_degenerate(p: [Point3; 3]) -> bool {
    let p = p.map(Point3::to_array);
    [(0, 1), (1, 2), (2, 0)]
        .iter()
        .all(|&(i, j)| orient2d([p[0][i], p[0][j]], [p[1][i], p[1][j]], [p[2][i], p[2][j]]).is_zero())
}

fn secs(a: Instant, b: Instant) -> f64 {
    b.duration_since(a).as_secs_f64()
}

/// Computes `op` over `meshes` from scratch.
pub fn boolean(meshes: &[Mesh], op: BooleanOp, options: &BooleanOptions) -> Result<BooleanResult, Error> {
    match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::invariant(format!("thread pool: {e}")))?;
            pool.install(|| run(meshes, op, options))
        }
        None => run(meshes, op, options),
    }
}

fn run(meshes: &[Mesh], op: BooleanOp, options: &BooleanOptions) -> Result<BooleanResult, Error> {
    if meshes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let counters0 = stats::snapshot();
    let t0 = Instant::now();
    for (i, m) in meshes.iter().enumerate() {
        m.check_indices()
            .map_err(|e| Error::InvalidInput(format!("mesh {i}: {e}")))?;
        if options.validate_input {
            let r = validate_mesh(m, options.validate_self_intersections);
            if !r.is_clean() {
                return Err(Error::InvalidInput(format!("mesh {i}: {}", r.summary())));
            }
        }
    }
    let soup = TriangleSoup::from_meshes(meshes);
    let prepared = preprocess(&soup)?;
    let t1 = Instant::now();
    let octree = build_octree(&prepared, options.octree);
    let t2 = Instant::now();
    let arr = arrange(prepared, octree)?;
    let t3 = Instant::now();
    let patches = extract_patches(&arr.mesh);
    let t4 = Instant::now();
    let (classified, cstats) = classify_patches(&arr, &patches, options.classify)?;
    let t5 = Instant::now();
    let kept = select_patches(&arr.mesh, &classified, op);
    let kept_patches = classified
        .iter()
        .filter(|cp| kept.binary_search_by_key(&cp.patch.representative, |k| k.triangle).is_ok())
        .count();
    let exact = stitch(&arr.mesh, &kept)?;
    let t6 = Instant::now();
    let (vertices, mut warnings) = snap(&exact, options.audit_intersections);
    let topo = check_topology(&exact.triangles);
    if !topo.manifold {
        warnings.push(
            "output is not a 2-manifold; inputs probably touch tangentially".to_string(),
        );
    }
    let t7 = Instant::now();

    let report = RunReport {
        op: op.to_string(),
        threads: rayon::current_num_threads(),
        times: StageTimes {
            preprocess: secs(t0, t1),
            octree: secs(t1, t2),
            arrangement: secs(t2, t3),
            classification: secs(t4, t5),
            extraction: secs(t3, t4) + secs(t5, t6),
            snap: secs(t6, t7),
            total: secs(t0, t7),
        },
        counts: RunCounts {
            inputs: meshes.len(),
            triangles_in: meshes.iter().map(|m| m.triangles.len()).sum(),
            arrangement_triangles: arr.mesh.triangles.len(),
            triangles_out: exact.triangles.len(),
            vertices_out: vertices.len(),
            patches: patches.len(),
            kept_patches,
            rays: cstats.rays,
            skipped_pairs: cstats.skipped_pairs,
            tiers: TierCounts {
                vertex_origin: cstats.vertex_origin,
                first_triangle: cstats.first_triangle,
                later_triangle: cstats.later_triangle,
                exact_rational: cstats.exact_rational,
            },
            max_triangles_tried: cstats.max_triangles_tried,
            perturbations: cstats.perturbations,
            warnings: warnings.len(),
        },
        arrangement: arr.stats,
        classification: cstats,
        predicates: stats::snapshot().since(counters0),
        warnings,
    };
    Ok(BooleanResult {
        vertices,
        triangles: exact.triangles,
        labels: exact.labels,
        exact_vertices: exact.vertices,
        report,
    })
}
