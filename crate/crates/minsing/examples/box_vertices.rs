//! Build a coefficient polytope from cone functionals and conormal data,
//! enumerate its vertices exactly, and print the induced piecewise-linear
//! weight together with its generic mass exponent.
//!
//! ```text
//! cargo run --example box_vertices
//! ```

use minsing::box_polytope::build_box;
use minsing::ns_geometry::{DivisorClass, PsefCone};
use minsing::rational::{format_rational, ratio};
use minsing::tropical_weight::{generic_lelong, TropicalWeight};

fn main() {
    // A two-dimensional cone with functionals x >= 0 and y >= 0, a class
    // whose restriction is negative on both, and two conormal classes with
    // positive restrictions that can compensate.
    let cone = PsefCone::new(
        2,
        vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]],
    )
    .expect("two independent functionals");
    let l_restr = DivisorClass::from_integers(&[-1, -2]);
    let conormals = vec![
        DivisorClass::from_integers(&[3, 1]),
        DivisorClass::from_integers(&[1, 4]),
    ];

    let bx = build_box(&cone, &l_restr, &conormals).expect("rank 2 data");

    println!("halfspaces:");
    for h in bx.halfspaces() {
        let coeffs: Vec<String> = h.normal.iter().map(format_rational).collect();
        println!("  [{}] . a + {} >= 0", coeffs.join(", "), format_rational(&h.offset));
    }

    println!("vertices:");
    for v in bx.vertices() {
        let coords: Vec<String> = v.iter().map(format_rational).collect();
        println!("  ({})", coords.join(", "));
    }

    match generic_lelong(&bx) {
        Some(c) => println!("generic exponent: {}", format_rational(&c)),
        None => println!("generic exponent: undefined (empty polytope)"),
    }

    let trop = TropicalWeight::from_box(&bx).expect("nonempty polytope");
    println!("tropical weight pieces (slope; offset):");
    for piece in trop.pieces() {
        let slopes: Vec<String> = piece.alpha().iter().map(format_rational).collect();
        println!("  ({}); {}", slopes.join(", "), piece.offset());
    }

    let probe = [-3.0, -1.5];
    let value = trop.evaluate(&probe).expect("probe matches the rank");
    println!("weight at ({}, {}): {value}", probe[0], probe[1]);
}
