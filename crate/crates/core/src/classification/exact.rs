//! Last tier: rational barycenter, rational ray, rational hits.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arrangement::Arrangement;
use crate::error::Error;
use crate::kernel::Point3;
use crate::labels::LabelSet;
use crate::spatial::Aabb;

use super::Classifier;

type Q = BigRational;
type Q3 = [Q; 3];

fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite coordinate")
}

fn sub(a: &Q3, b: &Q3) -> Q3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

/// `det(a - d, b - d, c - d)`, the same sign convention as `orient3d`.
fn orient(a: &Q3, b: &Q3, c: &Q3, d: &Q3) -> Q {
    let (x, y, z) = (sub(a, d), sub(b, d), sub(c, d));
    &x[0] * (&y[1] * &z[2] - &y[2] * &z[1]) - &x[1] * (&y[0] * &z[2] - &y[2] * &z[0])
        + &x[2] * (&y[0] * &z[1] - &y[1] * &z[0])
}

fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Offsets of the `k`-th ray direction on the two orthogonal axes.
fn tilt(k: usize) -> (i64, i64) {
    if k == 0 {
        return (0, 0);
    }
    let a = ((k * 37) % 17) as i64 - 8;
    let b = ((k * 53) % 19) as i64 - 9;
    if a == 0 && b == 0 {
        (1, 1)
    } else {
        (a, b)
    }
}

enum Outcome {
    Miss,
    Hit(Q, bool),
    Degenerate,
}

/// Crossing of segment `b q` with triangle `t`: the parameter along the
/// segment and whether the segment leaves the triangle's positive side.
fn crossing(b: &Q3, qp: &Q3, t: &[Q3; 3]) -> Outcome {
    let vb = orient(&t[0], &t[1], &t[2], b);
    let vq = orient(&t[0], &t[1], &t[2], qp);
    let (sb, sq) = (sign(&vb), sign(&vq));
    if sq == 0 {
        // The far end is outside the scene.
        return Outcome::Miss;
    }
    if sb == sq {
        return Outcome::Miss;
    }
    let s = [0, 1, 2].map(|i| sign(&orient(b, qp, &t[i], &t[(i + 1) % 3])));
    if s.contains(&1) && s.contains(&-1) {
        return Outcome::Miss;
    }
    if sb == 0 || s.contains(&0) {
        return Outcome::Degenerate;
    }
    Outcome::Hit(&vb / (&vb - &vq), sq < 0)
}

/// Classifies the patch through arrangement triangle `t` against
/// `targets`. Returns the inside set and the number of extra directions
/// tried.
pub(super) fn classify(
    arr: &Arrangement,
    c: &Classifier<'_>,
    t: u32,
    targets: &[usize],
) -> Result<(LabelSet, usize), Error> {
    let corners = arr.mesh.triangles[t as usize].map(|v| arr.mesh.vertices[v as usize].to_rational());
    let three = Q::from_integer(3.into());
    let b: Q3 = std::array::from_fn(|k| (&corners[0][k] + &corners[1][k] + &corners[2][k]) / &three);
    let (u, v) = c.axis.others();
    let len = q(3.0 * c.extent);
    let delta = q(2f64.powi(-30));
    let bf = b.clone().map(|x| x.to_f64().unwrap_or(0.0));
    let pad = c.extent * 1e-6;

    let budget = c.options.perturbation_budget.max(1);
    for k in 0..budget {
        let (ta, tb) = tilt(k);
        let mut d: Q3 = [Q::zero(), Q::zero(), Q::zero()];
        d[c.axis.index()] = Q::from_integer(1.into());
        d[u.index()] = &delta * Q::from_integer(ta.into());
        d[v.index()] = &delta * Q::from_integer(tb.into());
        let far: Q3 = std::array::from_fn(|i| &b[i] + &len * &d[i]);

        let ff = far.clone().map(|x| x.to_f64().unwrap_or(0.0));
        let mut qb = Aabb::from_points([&Point3::from_array(bf), &Point3::from_array(ff)]);
        for i in 0..3 {
            qb.min[i] -= pad;
            qb.max[i] += pad;
        }
        let cands = arr.octree.query_box(&qb);

        let mut inside = LabelSet::new();
        let mut degenerate = false;
        'meshes: for &m in targets {
            let mut best: Option<(Q, bool)> = None;
            let mut tie = false;
            for &ti in &cands {
                let ti = ti as usize;
                if !arr.soup.labels[ti].contains(m) || !arr.soup.boxes[ti].overlaps(&qb) {
                    continue;
                }
                let tri = arr.soup.corners(ti).map(|p| p.to_array().map(q));
                match crossing(&b, &far, &tri) {
                    Outcome::Miss => {}
                    Outcome::Degenerate => {
                        degenerate = true;
                        break 'meshes;
                    }
                    Outcome::Hit(s, leaves) => {
                        let leaves = leaves != arr.soup.flips[ti].contains(m);
                        match &best {
                            Some((bs, _)) if *bs < s => {}
                            Some((bs, _)) if *bs == s => tie = true,
                            _ => best = Some((s, leaves)),
                        }
                    }
                }
            }
            if tie {
                degenerate = true;
                break;
            }
            if let Some((_, true)) = best {
                inside.insert(m);
            }
        }
        if !degenerate {
            return Ok((inside, k));
        }
    }
    Err(Error::invariant(format!(
        "rational ray casting found no generic direction for triangle {t}"
    )))
}
