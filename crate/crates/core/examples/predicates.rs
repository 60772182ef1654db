//! Exact orientation tests on explicit and implicit points.
//!
//! Run with `cargo run --example predicates`.

use exactcsg::kernel::{orient3d, orient3d_generic, GenericPoint, PlaneCache, Point3};

fn main() {
    let a = Point3::new(0.0, 0.0, 0.0);
    let b = Point3::new(1.0, 0.0, 0.0);
    let c = Point3::new(0.0, 1.0, 0.0);

    // Negative means `p` is on the side the normal of `a b c` points to.
    // A point a tiny distance above the plane z = 0 and one exactly on it.
    let above = Point3::new(0.3, 0.3, f64::MIN_POSITIVE);
    let on = Point3::new(0.1 + 0.2, 0.7, 0.0);
    println!("orient3d above: {:?}", orient3d(&a, &b, &c, &above));
    println!("orient3d on:    {:?}", orient3d(&a, &b, &c, &on));

    // The cached form reuses the plane minors for every query.
    let plane = PlaneCache::new(a, b, c);
    println!("cached above:   {:?}", plane.orient(&above));

    // Where the segment (0.25, 0.25, -1)..(0.25, 0.25, 1) pierces z = 0,
    // kept as an implicit point and tested without rounding.
    let x = GenericPoint::lpi(Point3::new(0.25, 0.25, -1.0), Point3::new(0.25, 0.25, 1.0), a, b, c)
        .expect("line crosses the plane");
    let ga = GenericPoint::Explicit(a);
    let gb = GenericPoint::Explicit(b);
    let gc = GenericPoint::Explicit(c);
    println!("implicit point ~ {:?}", x.approximate());
    println!("orient3d of implicit point vs its own plane: {:?}", orient3d_generic(&ga, &gb, &gc, &x));
}
