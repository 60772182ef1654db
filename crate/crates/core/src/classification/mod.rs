//! Patch extraction and inside/outside classification by exact ray casting.
//!
//! Every patch gets one ray. It starts at an input vertex inside the patch
//! when one exists; otherwise at the rounded barycenter of one of its
//! triangles, pushed back along the ray axis, and the crossing with that
//! triangle becomes the emanation point. Only hits strictly after the
//! emanation point count, and the first one decides. Rays that graze an
//! edge, a vertex or a plane are perturbed one ulp at a time; when that
//! does not help the patch is classified with rational arithmetic.

mod exact;

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, ArrangementMesh, NO_NEIGHBOR};
use crate::error::Error;
use crate::kernel::{
    compare_on_axis, next_after, orient3d, orient3d_generic, point_in_triangle_2d, Axis,
    Containment, GenericPoint, PlaneCache, Point3, Sign,
};
use crate::labels::LabelSet;
use crate::spatial::{Aabb, AxisRay};

pub const DEFAULT_PERTURBATION_BUDGET: usize = 64;

/// Maximal set of triangles connected through unflagged edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    /// Ascending triangle ids.
    pub triangles: Vec<u32>,
    /// Labels shared by all triangles.
    pub owners: LabelSet,
    pub representative: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RayTier {
    /// Starts at an input vertex in the patch interior.
    VertexOrigin,
    /// Rounded barycenter of the first triangle tried.
    FirstTriangle,
    /// Rounded barycenter of a later triangle.
    LaterTriangle,
    /// Rational barycenter with rational casting.
    ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedPatch {
    pub patch: Patch,
    /// Meshes containing the patch. Owner meshes are never set.
    pub inside: LabelSet,
    /// `None` when no mesh needed a ray.
    pub tier: Option<RayTier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Ray axis; the longest side of the scene box when `None`.
    pub axis: Option<Axis>,
    /// Skip the floating point tiers.
    pub force_exact_tier: bool,
    pub perturbation_budget: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            axis: None,
            force_exact_tier: false,
            perturbation_budget: DEFAULT_PERTURBATION_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassifyStats {
    pub patches: usize,
    /// (patch, mesh) pairs resolved by a ray.
    pub rays: usize,
    /// (patch, mesh) pairs skipped because the boxes are disjoint.
    pub skipped_pairs: usize,
    pub vertex_origin: usize,
    pub first_triangle: usize,
    pub later_triangle: usize,
    pub exact_rational: usize,
    /// Most triangles tried for a single barycenter ray.
    pub max_triangles_tried: usize,
    pub perturbations: usize,
    pub perturbed_patches: usize,
    pub seconds: f64,
}

impl ClassifyStats {
    fn add(&mut self, o: &ClassifyStats) {
        self.patches += o.patches;
        self.rays += o.rays;
        self.skipped_pairs += o.skipped_pairs;
        self.vertex_origin += o.vertex_origin;
        self.first_triangle += o.first_triangle;
        self.later_triangle += o.later_triangle;
        self.exact_rational += o.exact_rational;
        self.max_triangles_tried = self.max_triangles_tried.max(o.max_triangles_tried);
        self.perturbations += o.perturbations;
        self.perturbed_patches += o.perturbed_patches;
    }

    /// Share of barycenter rays that succeeded on the first triangle; 1
    /// when no such ray was needed.
    pub fn first_triangle_rate(&self) -> f64 {
        let n = self.first_triangle + self.later_triangle + self.exact_rational;
        if n == 0 {
            1.0
        } else {
            self.first_triangle as f64 / n as f64
        }
    }
}

/// Flood fill across unflagged edges, in ascending triangle order.
pub fn extract_patches(mesh: &ArrangementMesh) -> Vec<Patch> {
    let n = mesh.triangles.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s as u32);
        let mut tris = Vec::new();
        while let Some(t) = stack.pop() {
            tris.push(t);
            for &nb in &mesh.neighbors[t as usize] {
                if nb != NO_NEIGHBOR && !seen[nb as usize] {
                    seen[nb as usize] = true;
                    stack.push(nb);
                }
            }
        }
        tris.sort_unstable();
        let mut owners = mesh.labels[tris[0] as usize].clone();
        for &t in &tris[1..] {
            owners = owners.intersection(&mesh.labels[t as usize]);
        }
        out.push(Patch {
            representative: tris[0],
            triangles: tris,
            owners,
        });
    }
    out
}

/// Longest side of the box; ties go to the lower axis.
pub fn preferred_axis(scene: &Aabb) -> Axis {
    let mut best = Axis::X;
    for a in [Axis::Y, Axis::Z] {
        if scene.extent(a) > scene.extent(best) {
            best = a;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    InsideToOutside,
    OutsideToInside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DegenerateHit {
    #[error("ray hits a triangle edge or vertex")]
    Boundary,
    #[error("ray lies in a triangle plane")]
    Coplanar,
    #[error("hit coincides with the emanation point")]
    AtEmanation,
    #[error("far point lies on the hit triangle plane")]
    ZeroVolume,
}

/// Direction of the crossing through the triangle cached in `plane`, as
/// seen from a ray that ends at `far`.
pub fn classify_hit(plane: &PlaneCache, far: &Point3) -> Result<Crossing, DegenerateHit> {
    match plane.orient(far) {
        Sign::Negative => Ok(Crossing::InsideToOutside),
        Sign::Positive => Ok(Crossing::OutsideToInside),
        Sign::Zero => Err(DegenerateHit::ZeroVolume),
    }
}

/// A ray from `origin` to `far`. Axis aligned unless perturbed; hits
/// count only strictly after `emanation`, which lies on the patch.
#[derive(Debug, Clone)]
pub struct Ray {
    pub origin: Point3,
    pub far: Point3,
    pub axis: Axis,
    pub emanation: GenericPoint,
    pub perturbed: bool,
    pub tier: RayTier,
    /// Arrangement triangle the ray goes through, for barycenter rays.
    pub through: Option<u32>,
    pub triangles_tried: usize,
}

impl Ray {
    fn direction(&self) -> Ordering {
        if self.far.coord(self.axis) >= self.origin.coord(self.axis) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

#[derive(Debug, Clone)]
pub struct RayHit {
    pub point: GenericPoint,
    /// Prepared-soup triangle.
    pub triangle: u32,
    pub crossing: Crossing,
}

/// Moves `far` by one ulp on the `step`-th coordinate of the round robin
/// over the two axes orthogonal to the ray.
pub fn perturb_far(far: Point3, axis: Axis, step: usize) -> Point3 {
    let (u, v) = axis.others();
    let a = if step % 2 == 0 { u } else { v };
    let mut p = far;
    p.set_coord(a, next_after(far.coord(a), f64::INFINITY));
    p
}

/// Same-sign test of the three tetrahedra spanned by the segment and the
/// triangle edges.
fn segment_through(o: &GenericPoint, q: &GenericPoint, t: [&GenericPoint; 3]) -> Containment {
    let s = [0, 1, 2].map(|i| orient3d_generic(o, q, t[i], t[(i + 1) % 3]));
    let pos = s.contains(&Sign::Positive);
    let neg = s.contains(&Sign::Negative);
    if pos && neg {
        Containment::Outside
    } else if s.contains(&Sign::Zero) {
        Containment::OnBoundary
    } else {
        Containment::Inside
    }
}

fn segment_through_explicit(o: &Point3, q: &Point3, t: &[Point3; 3]) -> Containment {
    let s = [0, 1, 2].map(|i| orient3d(o, q, &t[i], &t[(i + 1) % 3]));
    let pos = s.contains(&Sign::Positive);
    let neg = s.contains(&Sign::Negative);
    if pos && neg {
        Containment::Outside
    } else if s.contains(&Sign::Zero) {
        Containment::OnBoundary
    } else {
        Containment::Inside
    }
}

/// Read-only view of an arrangement prepared for ray casting.
pub struct Classifier<'a> {
    arr: &'a Arrangement,
    pub axis: Axis,
    /// Scene extent along the axis.
    pub extent: f64,
    options: ClassifyOptions,
    /// Vertices incident to an intersection edge.
    on_curve: Vec<bool>,
}

impl<'a> Classifier<'a> {
    pub fn new(arr: &'a Arrangement, options: ClassifyOptions) -> Classifier<'a> {
        let axis = options.axis.unwrap_or_else(|| preferred_axis(&arr.soup.scene_box));
        let e = arr.soup.scene_box.extent(axis);
        let extent = if e > 0.0 && e.is_finite() { e } else { 1.0 };
        let mut on_curve = vec![false; arr.mesh.vertices.len()];
        for (a, b) in arr.mesh.flagged_edges() {
            on_curve[a as usize] = true;
            on_curve[b as usize] = true;
        }
        Classifier {
            arr,
            axis,
            extent,
            options,
            on_curve,
        }
    }

    fn corners(&self, t: u32) -> [&GenericPoint; 3] {
        self.arr.mesh.triangles[t as usize].map(|v| &self.arr.mesh.vertices[v as usize])
    }

    fn patch_box(&self, patch: &Patch) -> Aabb {
        let mut b = Aabb::EMPTY;
        for &t in &patch.triangles {
            for p in self.corners(t) {
                let bb = p.bbox();
                for k in 0..3 {
                    b.min[k] = b.min[k].min(bb[k].lo);
                    b.max[k] = b.max[k].max(bb[k].hi);
                }
            }
        }
        b
    }

    fn far_from(&self, p: &Point3, dist: f64) -> Point3 {
        let mut q = *p;
        q.set_coord(self.axis, p.coord(self.axis) + dist);
        q
    }

    /// Vertex tier, then barycenters of the patch triangles in ascending
    /// order. `None` means only the rational tier is left.
    pub fn define_ray(&self, patch: &Patch) -> Option<Ray> {
        let mesh = &self.arr.mesh;
        for &t in &patch.triangles {
            for &v in &mesh.triangles[t as usize] {
                if self.on_curve[v as usize] {
                    continue;
                }
                if let GenericPoint::Explicit(p) = mesh.vertices[v as usize] {
                    return Some(Ray {
                        origin: p,
                        far: self.far_from(&p, 2.0 * self.extent),
                        axis: self.axis,
                        emanation: GenericPoint::Explicit(p),
                        perturbed: false,
                        tier: RayTier::VertexOrigin,
                        through: None,
                        triangles_tried: 0,
                    });
                }
            }
        }
        for (k, &t) in patch.triangles.iter().enumerate() {
            let c = self.corners(t).map(|p| p.approximate());
            let b = Point3::new(
                (c[0].x + c[1].x + c[2].x) / 3.0,
                (c[0].y + c[1].y + c[2].y) / 3.0,
                (c[0].z + c[1].z + c[2].z) / 3.0,
            );
            if !b.is_finite() {
                continue;
            }
            // The exact test decides whether the rounded barycenter still
            // projects strictly inside the exact triangle.
            let inside = point_in_triangle_2d(&GenericPoint::Explicit(b), self.corners(t), self.axis);
            if inside != Ok(Containment::Inside) {
                continue;
            }
            let origin = self.far_from(&b, -self.extent);
            let far = self.far_from(&b, 2.0 * self.extent);
            if let Some(emanation) = self.crossing_with(t, &origin, &far) {
                return Some(Ray {
                    origin,
                    far,
                    axis: self.axis,
                    emanation,
                    perturbed: false,
                    tier: if k == 0 {
                        RayTier::FirstTriangle
                    } else {
                        RayTier::LaterTriangle
                    },
                    through: Some(t),
                    triangles_tried: k + 1,
                });
            }
        }
        None
    }

    /// Crossing of segment `origin far` with the plane of arrangement
    /// triangle `t`, when the segment crosses it strictly.
    fn crossing_with(&self, t: u32, origin: &Point3, far: &Point3) -> Option<GenericPoint> {
        let parent = self.arr.mesh.parent[t as usize] as usize;
        let plane = &self.arr.soup.planes[parent];
        let (so, sq) = (plane.orient(origin), plane.orient(far));
        if so.is_zero() || sq.is_zero() || so == sq {
            return None;
        }
        let [a, b, c] = self.arr.soup.corners(parent);
        Some(GenericPoint::lpi_unchecked(*origin, *far, a, b, c))
    }

    /// Applies perturbation `step` to the far point. Barycenter rays must
    /// still cross their triangle strictly inside; `None` otherwise.
    pub fn perturb(&self, ray: &Ray, step: usize) -> Option<Ray> {
        self.with_far(ray, perturb_far(ray.far, ray.axis, step))
    }

    fn with_far(&self, ray: &Ray, far: Point3) -> Option<Ray> {
        let mut next = Ray {
            far,
            perturbed: true,
            ..ray.clone()
        };
        if let Some(t) = ray.through {
            let o = GenericPoint::Explicit(ray.origin);
            let q = GenericPoint::Explicit(far);
            if segment_through(&o, &q, self.corners(t)) != Containment::Inside {
                return None;
            }
            next.emanation = self.crossing_with(t, &ray.origin, &far)?;
        }
        Some(next)
    }

    fn candidates(&self, ray: &Ray) -> Vec<u32> {
        if ray.perturbed {
            self.arr
                .octree
                .query_box(&Aabb::from_points([&ray.origin, &ray.far]))
        } else {
            self.arr.octree.axis_ray_candidates(&AxisRay {
                origin: ray.origin,
                axis: ray.axis,
                far: ray.far.coord(ray.axis),
            })
        }
    }

    /// All crossings of the ray with mesh `m` strictly after the emanation
    /// point, nearest first.
    pub fn cast_ray(&self, ray: &Ray, m: usize) -> Result<Vec<RayHit>, DegenerateHit> {
        let cands = self.candidates(ray);
        self.hits_among(ray, &cands, m)
    }

    fn hits_among(&self, ray: &Ray, cands: &[u32], m: usize) -> Result<Vec<RayHit>, DegenerateHit> {
        let soup = &self.arr.soup;
        let dir = ray.direction();
        let explicit_start = ray.emanation.as_explicit() == Some(&ray.origin);
        let mut hits: Vec<RayHit> = Vec::new();
        for &t in cands {
            let ti = t as usize;
            if !soup.labels[ti].contains(m) {
                continue;
            }
            let plane = &soup.planes[ti];
            let (so, sq) = (plane.orient(&ray.origin), plane.orient(&ray.far));
            let corners = soup.corners(ti);
            if so == sq {
                if so.is_zero() && self.touches_in_plane(ray, &corners) {
                    return Err(DegenerateHit::Coplanar);
                }
                continue;
            }
            if sq.is_zero() {
                // The far point is outside the scene box, hence off the triangle.
                continue;
            }
            let inside = if ray.perturbed {
                segment_through_explicit(&ray.origin, &ray.far, &corners)
            } else {
                let g = corners.map(GenericPoint::Explicit);
                point_in_triangle_2d(&GenericPoint::Explicit(ray.origin), [&g[0], &g[1], &g[2]], ray.axis)
                    .map_err(|_| DegenerateHit::Coplanar)?
            };
            if inside == Containment::Outside {
                continue;
            }
            if so.is_zero() {
                // Hit at the origin: before the emanation point unless they coincide.
                if explicit_start {
                    return Err(DegenerateHit::AtEmanation);
                }
                continue;
            }
            let [a, b, c] = corners;
            let point = GenericPoint::lpi_unchecked(ray.origin, ray.far, a, b, c);
            if !explicit_start {
                match compare_on_axis(&point, &ray.emanation, ray.axis) {
                    Ordering::Equal => return Err(DegenerateHit::AtEmanation),
                    o if o != dir => continue,
                    _ => {}
                }
            }
            if inside == Containment::OnBoundary {
                return Err(DegenerateHit::Boundary);
            }
            let mut crossing = classify_hit(plane, &ray.far)?;
            if soup.flips[ti].contains(m) {
                crossing = match crossing {
                    Crossing::InsideToOutside => Crossing::OutsideToInside,
                    Crossing::OutsideToInside => Crossing::InsideToOutside,
                };
            }
            hits.push(RayHit {
                point,
                triangle: t,
                crossing,
            });
        }
        let mut tie = false;
        hits.sort_by(|x, y| {
            let o = compare_on_axis(&x.point, &y.point, ray.axis);
            if o == Ordering::Equal {
                tie = true;
            }
            if dir == Ordering::Greater {
                o
            } else {
                o.reverse()
            }
        });
        if tie {
            return Err(DegenerateHit::Boundary);
        }
        Ok(hits)
    }

    /// Conservative test for a ray lying in the plane of a triangle.
    fn touches_in_plane(&self, ray: &Ray, corners: &[Point3; 3]) -> bool {
        let tb = Aabb::from_points(corners.iter());
        tb.overlaps(&Aabb::from_points([&ray.origin, &ray.far]))
    }

    /// Classifies one patch against every mesh it does not own.
    pub fn classify_patch(&self, patch: &Patch) -> Result<(ClassifiedPatch, ClassifyStats), Error> {
        let n = self.arr.mesh.mesh_count;
        let pb = self.patch_box(patch);
        let mut stats = ClassifyStats {
            patches: 1,
            ..Default::default()
        };
        let mut targets = Vec::new();
        for m in 0..n {
            if patch.owners.contains(m) {
                continue;
            }
            if pb.overlaps(&self.arr.soup.mesh_boxes[m]) {
                targets.push(m);
            } else {
                stats.skipped_pairs += 1;
            }
        }
        let done = |inside: LabelSet, tier: Option<RayTier>, mut stats: ClassifyStats| {
            match tier {
                Some(RayTier::VertexOrigin) => stats.vertex_origin += 1,
                Some(RayTier::FirstTriangle) => stats.first_triangle += 1,
                Some(RayTier::LaterTriangle) => stats.later_triangle += 1,
                Some(RayTier::ExactRational) => stats.exact_rational += 1,
                None => {}
            }
            Ok((
                ClassifiedPatch {
                    patch: patch.clone(),
                    inside,
                    tier,
                },
                stats,
            ))
        };
        if targets.is_empty() {
            return done(LabelSet::new(), None, stats);
        }
        stats.rays = targets.len();

        let ray = if self.options.force_exact_tier {
            None
        } else {
            self.define_ray(patch)
        };
        if let Some(r) = &ray {
            stats.max_triangles_tried = r.triangles_tried;
        }
        if let Some(base) = ray {
            let mut far = base.far;
            let mut current = Some(base.clone());
            for step in 0..=self.options.perturbation_budget {
                if step > 0 {
                    stats.perturbations += 1;
                    stats.perturbed_patches = 1;
                    far = perturb_far(far, self.axis, step - 1);
                    current = self.with_far(&base, far);
                }
                if let Some(r) = &current {
                    if let Ok(inside) = self.first_hits(r, &targets) {
                        return done(inside, Some(r.tier), stats);
                    }
                }
            }
        }

        let t = patch.representative;
        let (inside, extra) = exact::classify(self.arr, self, t, &targets)?;
        stats.perturbations += extra;
        done(inside, Some(RayTier::ExactRational), stats)
    }

    /// Inside bits from the first hit on every target mesh.
    fn first_hits(&self, ray: &Ray, targets: &[usize]) -> Result<LabelSet, DegenerateHit> {
        let cands = self.candidates(ray);
        let mut inside = LabelSet::new();
        for &m in targets {
            let hits = self.hits_among(ray, &cands, m)?;
            if let Some(h) = hits.first() {
                if h.crossing == Crossing::InsideToOutside {
                    inside.insert(m);
                }
            }
        }
        Ok(inside)
    }
}

/// Classifies every patch; results follow the patch order.
pub fn classify_patches(
    arr: &Arrangement,
    patches: &[Patch],
    options: ClassifyOptions,
) -> Result<(Vec<ClassifiedPatch>, ClassifyStats), Error> {
    let t0 = Instant::now();
    let c = Classifier::new(arr, options);
    let results: Vec<(ClassifiedPatch, ClassifyStats)> = patches
        .par_iter()
        .map(|p| c.classify_patch(p))
        .collect::<Result<_, _>>()?;
    let mut stats = ClassifyStats::default();
    let mut out = Vec::with_capacity(results.len());
    for (cp, s) in results {
        stats.add(&s);
        out.push(cp);
    }
    stats.seconds = t0.elapsed().as_secs_f64();
    Ok((out, stats))
}
