use exactcsg::shapes::{cube, thick_disc, uv_sphere};
use exactcsg::topology::{check_topology, validate_connectivity};
use exactcsg::{boolean, BooleanOp, BooleanOptions, BooleanResult, LabelSet, Mesh, RigidTransform};
use exactcsg_oracle::{self as oracle, InputMesh};
use num_rational::BigRational;
use num_traits::Zero;

fn input(m: &Mesh) -> InputMesh {
    InputMesh {
        vertices: m.vertices.iter().map(|p| p.to_array()).collect(),
        triangles: m.triangles.clone(),
    }
}

fn oracle_op(op: BooleanOp) -> oracle::Op {
    match op {
        BooleanOp::Union => oracle::Op::Union,
        BooleanOp::Intersection => oracle::Op::Intersection,
        BooleanOp::Subtraction => oracle::Op::Subtraction,
    }
}

fn run(meshes: &[Mesh], op: BooleanOp) -> BooleanResult {
    boolean(meshes, op, &BooleanOptions::default()).expect("boolean succeeds")
}

/// Six times the enclosed volume, from the unrounded vertices, restricted
/// to triangles accepted by `keep`.
fn volume6_where(r: &BooleanResult, keep: impl Fn(&LabelSet) -> bool) -> BigRational {
    let p: Vec<[BigRational; 3]> = r.exact_vertices.iter().map(|v| v.to_rational()).collect();
    let mut v = BigRational::zero();
    for (t, l) in r.triangles.iter().zip(&r.labels) {
        if !keep(l) {
            continue;
        }
        let [a, b, c] = t.map(|i| &p[i as usize]);
        let cx = [
            &b[1] * &c[2] - &b[2] * &c[1],
            &b[2] * &c[0] - &b[0] * &c[2],
            &b[0] * &c[1] - &b[1] * &c[0],
        ];
        v += &a[0] * &cx[0] + &a[1] * &cx[1] + &a[2] * &cx[2];
    }
    v
}

fn volume6(r: &BooleanResult) -> BigRational {
    volume6_where(r, |_| true)
}

fn topo(r: &BooleanResult) -> (usize, i64, bool) {
    let t = check_topology(&r.triangles);
    (t.components, t.euler, t.manifold)
}

/// Checks components, Euler characteristic and exact volume against the
/// rational reference, plus closed-manifold connectivity.
fn check_against_oracle(meshes: &[Mesh], op: BooleanOp) -> BooleanResult {
    let r = run(meshes, op);
    let inputs: Vec<InputMesh> = meshes.iter().map(input).collect();
    let o = oracle::boolean(&inputs, oracle_op(op)).expect("oracle succeeds");
    let (c, e, manifold) = topo(&r);
    assert_eq!((c, e), (o.components, o.euler), "{op} topology");
    assert!(manifold, "{op} result is not manifold");
    assert!(validate_connectivity(&r.triangles).is_clean(), "{op}");
    assert_eq!(volume6(&r), o.volume6(), "{op} volume");
    r
}

fn posed(m: &Mesh, axis: [f64; 3], angle: f64, t: [f64; 3]) -> Mesh {
    m.transformed(&RigidTransform::from_axis_angle(axis, angle, t))
}

#[test]
fn disjoint_spheres() {
    let a = uv_sphere([0.0; 3], 1.0, 12, 8);
    let b = uv_sphere([5.0, 0.0, 0.0], 1.0, 12, 8);
    let u = run(&[a.clone(), b.clone()], BooleanOp::Union);
    assert_eq!(topo(&u), (2, 4, true));
    assert_eq!(u.triangles.len(), a.triangles.len() + b.triangles.len());
    assert!(u.report.warnings.is_empty());
    let i = run(&[a.clone(), b.clone()], BooleanOp::Intersection);
    assert!(i.triangles.is_empty());
    let s = run(&[a.clone(), b], BooleanOp::Subtraction);
    assert_eq!(topo(&s), (1, 2, true));
    assert!(s.labels.iter().all(|l| *l == LabelSet::single(0)));
}

#[test]
fn explicit_results_keep_input_bits() {
    let a = uv_sphere([0.0; 3], 1.0, 10, 7);
    let b = uv_sphere([4.0, 0.5, 0.0], 0.75, 9, 6);
    let u = run(&[a.clone(), b.clone()], BooleanOp::Union);
    let mut got: Vec<[u64; 3]> = u.vertices.iter().map(|p| p.key()).collect();
    let mut want: Vec<[u64; 3]> = a.vertices.iter().chain(&b.vertices).map(|p| p.key()).collect();
    got.sort_unstable();
    want.sort_unstable();
    want.dedup();
    assert_eq!(got, want);
    assert!(u.exact_vertices.iter().all(|v| v.is_explicit()));
    assert!(u.report.warnings.is_empty());
}

#[test]
fn overlapping_cubes_match_oracle() {
    let a = cube([0.0; 3], 1.0);
    let b = cube([0.5, 0.25, 0.125], 1.0);
    for op in BooleanOp::ALL {
        let r = check_against_oracle(&[a.clone(), b.clone()], op);
        assert_eq!(topo(&r), (1, 2, true));
    }
}

#[test]
fn posed_spheres_match_oracle() {
    let a = uv_sphere([0.0; 3], 1.0, 10, 6);
    let b = posed(&uv_sphere([0.0; 3], 0.8, 9, 7), [0.3, 1.0, 0.2], 0.7, [0.9, 0.3, -0.2]);
    for op in BooleanOp::ALL {
        check_against_oracle(&[a.clone(), b.clone()], op);
    }
}

#[test]
fn volumes_tile_the_first_operand() {
    let a = posed(&cube([-0.5; 3], 1.0), [1.0, 2.0, 3.0], 0.4, [0.0; 3]);
    let b = uv_sphere([0.4, 0.3, 0.2], 0.6, 11, 7);
    let inter = run(&[a.clone(), b.clone()], BooleanOp::Intersection);
    let diff = run(&[a.clone(), b.clone()], BooleanOp::Subtraction);
    let whole = oracle::mesh_volume6(&input(&a));
    assert_eq!(volume6(&inter) + volume6(&diff), whole);
    let union = run(&[a, b.clone()], BooleanOp::Union);
    let vb = oracle::mesh_volume6(&input(&b));
    assert_eq!(volume6(&union) + volume6(&inter), whole + vb);
}

#[test]
fn coincident_cubes() {
    let a = cube([0.0; 3], 1.0);
    let ms = [a.clone(), a.clone()];
    let u = check_against_oracle(&ms, BooleanOp::Union);
    assert_eq!(u.triangles.len(), 12);
    assert!(u.labels.iter().all(|l| *l == LabelSet::from_indices([0, 1])));
    let i = check_against_oracle(&ms, BooleanOp::Intersection);
    assert_eq!(i.triangles.len(), 12);
    let s = run(&ms, BooleanOp::Subtraction);
    assert!(s.triangles.is_empty());
}

#[test]
fn face_sharing_cubes_merge() {
    let a = cube([0.0; 3], 1.0);
    let b = cube([1.0, 0.0, 0.0], 1.0);
    let u = check_against_oracle(&[a.clone(), b.clone()], BooleanOp::Union);
    assert_eq!(topo(&u), (1, 2, true));
    let s = check_against_oracle(&[a.clone(), b.clone()], BooleanOp::Subtraction);
    assert_eq!(volume6(&s), BigRational::from_integer(6.into()));
    // Partial overlap of the shared face.
    let c = cube([1.0, 0.5, 0.25], 1.0);
    for op in BooleanOp::ALL {
        check_against_oracle(&[a.clone(), c.clone()], op);
    }
}

#[test]
fn cavity() {
    let a = cube([0.0; 3], 4.0);
    let b = uv_sphere([2.0; 3], 1.0, 12, 8);
    let s = check_against_oracle(&[a.clone(), b.clone()], BooleanOp::Subtraction);
    assert_eq!(topo(&s), (2, 4, true));
    let inner = volume6_where(&s, |l| *l == LabelSet::single(1));
    assert_eq!(inner, -oracle::mesh_volume6(&input(&b)));
    let i = run(&[a, b.clone()], BooleanOp::Intersection);
    assert_eq!(i.triangles.len(), b.triangles.len());
}

#[test]
fn thickened_coplanar_discs() {
    let a = thick_disc([0.0, 0.0], 1.0, 0.0, 0.25, 24);
    let b = thick_disc([0.7, 0.2], 0.8, 0.0, 0.25, 17);
    let r = check_against_oracle(&[a.clone(), b.clone()], BooleanOp::Subtraction);
    let (_, e, _) = topo(&r);
    assert!(e != -50 && e != 16);
    for op in [BooleanOp::Union, BooleanOp::Intersection] {
        check_against_oracle(&[a.clone(), b.clone()], op);
    }
}

#[test]
fn three_inputs_match_oracle() {
    let a = cube([0.0; 3], 1.0);
    let b = uv_sphere([0.9, 0.5, 0.5], 0.45, 10, 6);
    let c = posed(&cube([-0.25; 3], 0.5), [0.0, 1.0, 1.0], 0.5, [0.3, 0.8, 0.6]);
    for op in BooleanOp::ALL {
        check_against_oracle(&[a.clone(), b.clone(), c.clone()], op);
    }
}

fn spherelets(n: usize) -> Vec<Mesh> {
    (0..n)
        .map(|k| {
            let (i, j) = ((k % 5) as f64, (k / 5) as f64);
            uv_sphere([0.5 + i, 0.5 + j, 3.0], 0.3, 8, 5)
        })
        .collect()
}

#[test]
fn variadic_subtraction_matches_merged_subtrahend() {
    let base = cube([0.0, 0.0, 2.85], 5.0);
    let holes = spherelets(10);
    let mut many = vec![base.clone()];
    many.extend(holes.iter().cloned());
    let a = run(&many, BooleanOp::Subtraction);
    let b = run(&[base, Mesh::merged(&holes)], BooleanOp::Subtraction);
    assert_eq!(a.triangles, b.triangles);
    let key = |r: &BooleanResult| r.vertices.iter().map(|p| p.key()).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
    // Labels agree once every subtrahend index is folded onto 1.
    let fold = |l: &LabelSet| LabelSet::from_indices(l.iter().map(|i| i.min(1)));
    let la: Vec<LabelSet> = a.labels.iter().map(fold).collect();
    assert_eq!(la, b.labels);
    assert_eq!(topo(&a), (1, 2, true));
}

#[test]
fn worker_count_does_not_change_output() {
    let a = uv_sphere([0.0; 3], 1.0, 14, 9);
    let b = posed(&cube([-0.6; 3], 1.2), [1.0, 1.0, 0.0], 0.3, [0.5, 0.2, 0.1]);
    for op in BooleanOp::ALL {
        let mut outs = Vec::new();
        for threads in [1, 3] {
            let opts = BooleanOptions {
                threads: Some(threads),
                ..Default::default()
            };
            let r = boolean(&[a.clone(), b.clone()], op, &opts).unwrap();
            assert_eq!(r.report.threads, threads);
            outs.push(r);
        }
        assert_eq!(outs[0].triangles, outs[1].triangles);
        assert_eq!(outs[0].labels, outs[1].labels);
        let bits = |r: &BooleanResult| r.vertices.iter().map(|p| p.key()).collect::<Vec<_>>();
        assert_eq!(bits(&outs[0]), bits(&outs[1]));
    }
}

#[test]
fn input_validation_rejects_open_meshes() {
    let mut open = cube([0.0; 3], 1.0);
    open.triangles.truncate(10);
    let b = cube([0.5; 3], 1.0);
    let opts = BooleanOptions {
        validate_input: true,
        ..Default::default()
    };
    let err = boolean(&[open, b], BooleanOp::Union, &opts).unwrap_err();
    assert!(matches!(err, exactcsg::Error::InvalidInput(_)), "{err}");
}

#[test]
fn report_is_consistent() {
    let a = uv_sphere([0.0; 3], 1.0, 12, 8);
    let b = uv_sphere([0.6, 0.1, 0.0], 1.0, 12, 8);
    let r = run(&[a, b], BooleanOp::Union);
    let rep = &r.report;
    assert_eq!(rep.counts.triangles_out, r.triangles.len());
    assert_eq!(rep.counts.vertices_out, r.vertices.len());
    assert!(rep.counts.rays >= rep.counts.patches);
    let t = &rep.times;
    for x in [t.preprocess, t.octree, t.arrangement, t.classification, t.extraction, t.snap] {
        assert!(x >= 0.0 && x <= t.total + 1e-9);
    }
    let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(json["op"], "union");
}

#[test]
fn near_coincident_rotation_warns_but_returns() {
    // A copy rotated by a few ulps: the cut curves hug the cube edges and
    // rounding folds distinct intersection points together.
    let a = cube([0.0; 3], 1.0);
    let b = posed(&cube([-0.5; 3], 1.0), [0.0, 0.0, 1.0], 1e-15, [0.5, 0.5, 0.5 + 1e-15]);
    let r = boolean(
        &[a, b],
        BooleanOp::Union,
        &BooleanOptions {
            audit_intersections: true,
            ..Default::default()
        },
    )
    .expect("still returns a result");
    assert!(!r.triangles.is_empty());
    assert!(!r.report.warnings.is_empty(), "{:?}", r.report.counts);
}

#[test]
fn point_on_result_surface_is_rounded_lpi() {
    let a = cube([0.0; 3], 1.0);
    let b = posed(&cube([-0.5; 3], 1.0), [1.0, 2.0, 3.0], 0.3, [1.0, 0.9, 0.8]);
    let r = run(&[a, b], BooleanOp::Intersection);
    for (p, e) in r.vertices.iter().zip(&r.exact_vertices) {
        assert_eq!(p.key(), e.approximate().key());
    }
    assert!(r.exact_vertices.iter().any(|v| !v.is_explicit()));
}
