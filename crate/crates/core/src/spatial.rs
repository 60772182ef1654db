//! Axis-aligned octree over triangle bounding boxes.
//!
//! Box tests use closed float comparisons: they may report extra
//! candidates, never miss one. Exactness is the kernel's job.

use crate::kernel::{Axis, Point3};

pub const DEFAULT_LEAF_CAPACITY: usize = 32;
pub const DEFAULT_MAX_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: [f64::INFINITY; 3],
        max: [f64::NEG_INFINITY; 3],
    };

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point3>) -> Aabb {
        let mut b = Aabb::EMPTY;
        for p in pts {
            b.include(p);
        }
        b
    }

    #[inline]
    pub fn include(&mut self, p: &Point3) {
        let a = p.to_array();
        for k in 0..3 {
            self.min[k] = self.min[k].min(a[k]);
            self.max[k] = self.max[k].max(a[k]);
        }
    }

    #[inline]
    pub fn union(&self, o: &Aabb) -> Aabb {
        let mut r = *self;
        for k in 0..3 {
            r.min[k] = r.min[k].min(o.min[k]);
            r.max[k] = r.max[k].max(o.max[k]);
        }
        r
    }

    #[inline]
    pub fn overlaps(&self, o: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= o.max[k] && o.min[k] <= self.max[k])
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        (0..3).any(|k| self.min[k] > self.max[k])
    }

    #[inline]
    pub fn extent(&self, axis: Axis) -> f64 {
        self.max[axis.index()] - self.min[axis.index()]
    }

    /// Whether the 2D projection dropping `axis` contains `(u, v)`.
    #[inline]
    pub fn contains_projected(&self, axis: Axis, u: f64, v: f64) -> bool {
        let (ua, va) = axis.others();
        let (i, j) = (ua.index(), va.index());
        self.min[i] <= u && u <= self.max[i] && self.min[j] <= v && v <= self.max[j]
    }

    fn child(&self, octant: usize, mid: &[f64; 3]) -> Aabb {
        let mut c = *self;
        for k in 0..3 {
            if octant >> k & 1 == 0 {
                c.max[k] = mid[k];
            } else {
                c.min[k] = mid[k];
            }
        }
        c
    }
}

/// Ray along a coordinate axis from `origin` to the point whose `axis`
/// coordinate is `far`, all other coordinates equal to the origin's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRay {
    pub origin: Point3,
    pub axis: Axis,
    pub far: f64,
}

impl AxisRay {
    pub fn direction(&self) -> f64 {
        if self.far >= self.origin.coord(self.axis) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn far_point(&self) -> Point3 {
        let mut p = self.origin;
        p.set_coord(self.axis, self.far);
        p
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Vec<u32>),
    Inner(Box<[u32; 8]>),
}

#[derive(Debug, Clone)]
pub struct Octree {
    pub root_box: Aabb,
    pub leaf_capacity: usize,
    pub max_depth: usize,
    nodes: Vec<Node>,
    boxes: Vec<Aabb>,
}

impl Octree {
    /// Builds the tree over `tri_boxes` inside `root_box`. A leaf splits while
    /// it holds more than `leaf_capacity` ids and depth allows.
    pub fn build(tri_boxes: &[Aabb], root_box: Aabb, leaf_capacity: usize, max_depth: usize) -> Octree {
        let mut tree = Octree {
            root_box,
            leaf_capacity: leaf_capacity.max(1),
            max_depth,
            nodes: Vec::new(),
            boxes: Vec::new(),
        };
        let ids: Vec<u32> = (0..tri_boxes.len() as u32)
            .filter(|&i| tri_boxes[i as usize].overlaps(&root_box))
            .collect();
        tree.nodes.push(Node::Leaf(Vec::new()));
        tree.boxes.push(root_box);
        let mut stack = vec![(0usize, ids, 0usize)];
        while let Some((node, ids, depth)) = stack.pop() {
            let bx = tree.boxes[node];
            if ids.len() <= tree.leaf_capacity || depth >= tree.max_depth {
                tree.nodes[node] = Node::Leaf(ids);
                continue;
            }
            let mid = [
                0.5 * (bx.min[0] + bx.max[0]),
                0.5 * (bx.min[1] + bx.max[1]),
                0.5 * (bx.min[2] + bx.max[2]),
            ];
            if (0..3).all(|k| !(bx.min[k] < mid[k] && mid[k] < bx.max[k])) {
                tree.nodes[node] = Node::Leaf(ids);
                continue;
            }
            let mut children = [0u32; 8];
            let mut child_ids: Vec<Vec<u32>> = vec![Vec::new(); 8];
            for &id in &ids {
                let tb = &tri_boxes[id as usize];
                for (o, list) in child_ids.iter_mut().enumerate() {
                    if bx.child(o, &mid).overlaps(tb) {
                        list.push(id);
                    }
                }
            }
            let nonempty = child_ids.iter().filter(|l| !l.is_empty()).count();
            if nonempty > 1 && child_ids.iter().all(|l| l.is_empty() || l.len() == ids.len()) {
                // no child separates anything
                tree.nodes[node] = Node::Leaf(ids);
                continue;
            }
            for (o, list) in child_ids.into_iter().enumerate() {
                let idx = tree.nodes.len();
                tree.nodes.push(Node::Leaf(Vec::new()));
                tree.boxes.push(bx.child(o, &mid));
                children[o] = idx as u32;
                stack.push((idx, list, depth + 1));
            }
            tree.nodes[node] = Node::Inner(Box::new(children));
        }
        tree
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Leaves in depth-first octant order, with their boxes.
    pub fn leaves(&self) -> impl Iterator<Item = (&Aabb, &[u32])> + '_ {
        let mut order = Vec::new();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf(_) => order.push(n),
                Node::Inner(ch) => stack.extend(ch.iter().rev().map(|&c| c as usize)),
            }
        }
        order.into_iter().map(move |n| match &self.nodes[n] {
            Node::Leaf(ids) => (&self.boxes[n], ids.as_slice()),
            Node::Inner(_) => unreachable!(),
        })
    }

    fn visit(&self, mut accept: impl FnMut(&Aabb) -> bool, mut leaf: impl FnMut(usize, &[u32])) {
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            if !accept(&self.boxes[n]) {
                continue;
            }
            match &self.nodes[n] {
                Node::Leaf(ids) => leaf(n, ids),
                Node::Inner(ch) => stack.extend(ch.iter().rev().map(|&c| c as usize)),
            }
        }
    }

    /// Ids stored in leaves overlapping `query`, sorted and unique. The
    /// caller filters by its own boxes when it needs exact AABB overlap.
    pub fn query_box(&self, query: &Aabb) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit(|b| b.overlaps(query), |_, ids| out.extend_from_slice(ids));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Leaves crossed by an axis-aligned ray, nearest first, with their
    /// boxes.
    pub fn traverse_axis_ray(&self, ray: &AxisRay) -> Vec<(&Aabb, &[u32])> {
        let (u_axis, v_axis) = ray.axis.others();
        let (u, v) = (ray.origin.coord(u_axis), ray.origin.coord(v_axis));
        let k = ray.axis.index();
        let o = ray.origin.coord(ray.axis);
        let (lo, hi) = if ray.far >= o { (o, ray.far) } else { (ray.far, o) };
        let mut hits: Vec<(f64, usize)> = Vec::new();
        self.visit(
            |b| b.contains_projected(ray.axis, u, v) && b.min[k] <= hi && lo <= b.max[k],
            |n, _| {
                let b = &self.boxes[n];
                let key = if ray.far >= o { b.min[k] } else { -b.max[k] };
                hits.push((key, n));
            },
        );
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        hits.into_iter()
            .map(|(_, n)| match &self.nodes[n] {
                Node::Leaf(ids) => (&self.boxes[n], ids.as_slice()),
                Node::Inner(_) => unreachable!(),
            })
            .collect()
    }

    /// Candidate ids for a ray: union of the traversed leaves, sorted and
    /// unique.
    pub fn axis_ray_candidates(&self, ray: &AxisRay) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .traverse_axis_ray(ray)
            .into_iter()
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_boxes(n: usize, seed: u64) -> Vec<Aabb> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let c: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
                let s: f64 = rng.gen_range(0.0..0.05);
                Aabb {
                    min: [c[0] - s, c[1] - s, c[2] - s],
                    max: [c[0] + s, c[1] + s, c[2] + s],
                }
            })
            .collect()
    }

    fn scene(boxes: &[Aabb]) -> Aabb {
        boxes.iter().fold(Aabb::EMPTY, |a, b| a.union(b))
    }

    #[test]
    fn single_triangle_single_leaf() {
        let b = random_boxes(1, 1);
        let t = Octree::build(&b, b[0], 32, 10);
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.query_box(&b[0]), vec![0]);
    }

    #[test]
    fn capacity_above_count_gives_one_leaf() {
        let b = random_boxes(50, 2);
        let t = Octree::build(&b, scene(&b), 64, 10);
        assert_eq!(t.leaf_count(), 1);
    }

    #[test]
    fn leaves_report_exactly_the_overlapping_triangles() {
        let b = random_boxes(2000, 3);
        let t = Octree::build(&b, scene(&b), 8, 10);
        assert!(t.leaf_count() > 8);
        for (lb, ids) in t.leaves() {
            let expect: Vec<u32> = (0..b.len() as u32)
                .filter(|&i| b[i as usize].overlaps(lb))
                .collect();
            let mut got = ids.to_vec();
            got.sort_unstable();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn query_box_matches_brute_force() {
        let b = random_boxes(2000, 4);
        let t = Octree::build(&b, scene(&b), 16, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let q = random_boxes(1, rng.gen())[0];
            let got = t.query_box(&q);
            let must: Vec<u32> = (0..b.len() as u32)
                .filter(|&i| b[i as usize].overlaps(&q))
                .collect();
            for m in &must {
                assert!(got.binary_search(m).is_ok());
            }
        }
        assert!(t.query_box(&Aabb { min: [5.0; 3], max: [6.0; 3] }).is_empty());
        assert_eq!(t.query_box(&scene(&b)).len(), b.len());
    }

    #[test]
    fn ray_traversal_matches_brute_force() {
        let b = random_boxes(3000, 6);
        let root = scene(&b);
        let t = Octree::build(&b, root, 16, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..300 {
            let axis = Axis::from_index(i);
            let mut origin = Point3::new(rng.gen(), rng.gen(), rng.gen());
            origin.set_coord(axis, -1.0);
            let ray = AxisRay { origin, axis, far: 2.0 };
            let leaves = t.traverse_axis_ray(&ray);
            let mut expect: Vec<(f64, Vec<u32>)> = t
                .leaves()
                .filter(|(lb, _)| {
                    let (ua, va) = axis.others();
                    lb.contains_projected(axis, origin.coord(ua), origin.coord(va))
                })
                .map(|(lb, ids)| (lb.min[axis.index()], ids.to_vec()))
                .collect();
            let mut got: Vec<(f64, Vec<u32>)> = leaves
                .iter()
                .map(|(lb, ids)| (lb.min[axis.index()], ids.to_vec()))
                .collect();
            // nearest first
            assert!(got.windows(2).all(|w| w[0].0 <= w[1].0));
            let key = |a: &(f64, Vec<u32>), b: &(f64, Vec<u32>)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            got.sort_by(key);
            expect.sort_by(key);
            assert_eq!(got, expect);
            // every box the ray stabs is reported
            let cands = t.axis_ray_candidates(&ray);
            let (ua, va) = axis.others();
            for (i, bx) in b.iter().enumerate() {
                if bx.contains_projected(axis, origin.coord(ua), origin.coord(va)) {
                    assert!(cands.binary_search(&(i as u32)).is_ok());
                }
            }
        }
        let miss = AxisRay {
            origin: Point3::new(5.0, 5.0, -1.0),
            axis: Axis::Z,
            far: 2.0,
        };
        assert!(t.traverse_axis_ray(&miss).is_empty());
    }
}
