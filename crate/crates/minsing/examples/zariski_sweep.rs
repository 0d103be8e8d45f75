//! Sweep the blow-up of projective three-space in 1 to 20 points and report,
//! for each point count, the restricted degrees, positivity of the Zariski
//! decomposition, and the generic mass exponent read off the model polytope.
//!
//! ```text
//! cargo run --example zariski_sweep
//! ```

use minsing::box_polytope::build_box;
use minsing::ns_geometry::{is_nef_zariski, zariski_degrees, DivisorClass, PsefCone};
use minsing::rational::{format_rational, ratio};
use minsing::tropical_weight::generic_lelong;

fn main() {
    println!("{:>3}  {:>8}  {:>8}  {:>5}  {:>10}", "n", "deg L", "deg N", "nef", "exponent");
    for n in 1..=20u32 {
        let (deg_l, _, deg_n) = zariski_degrees(n);
        let nef = is_nef_zariski(n);

        let cone = PsefCone::new(1, vec![vec![ratio(1, 1)]]).expect("a ray is a valid cone");
        let l_restr = DivisorClass::new(vec![deg_l.clone()]);
        let conormals = vec![
            DivisorClass::new(vec![-deg_n.clone()]),
            DivisorClass::new(vec![-deg_n.clone()]),
        ];
        let bx = build_box(&cone, &l_restr, &conormals).expect("rank 2 model data");
        let exponent = generic_lelong(&bx).expect("the model polytope is never empty");

        println!(
            "{:>3}  {:>8}  {:>8}  {:>5}  {:>10}",
            n,
            format_rational(&deg_l),
            format_rational(&deg_n),
            nef,
            format_rational(&exponent),
        );
    }

    println!();
    println!("positive exponents start at n = 13, where the pulled-back class");
    println!("stops being nef and the two exceptional directions pick up mass.");
}
