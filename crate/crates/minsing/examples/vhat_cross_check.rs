//! Assemble the toy global envelope over a product grid and cross-check it
//! two ways: flat base weights must reproduce the purely tropical weight,
//! and refining the exponent family must only push the envelope upward.
//!
//! ```text
//! cargo run --example vhat_cross_check
//! ```

use minsing::box_polytope::{BoxPolytope, Halfspace};
use minsing::envelope_1d::{vhat_toy, RadialWeight, UniformGrid};
use minsing::rational::{format_rational, ratio};
use minsing::tropical_weight::TropicalWeight;

/// Exponent polytope of the 16-point model: `alpha >= 0`, `|alpha| <= 1`,
/// `8 alpha_1 + 8 alpha_2 - 4 >= 0`.
fn model_box() -> BoxPolytope {
    let hs = vec![
        Halfspace {
            normal: vec![ratio(1, 1), ratio(0, 1)],
            offset: ratio(0, 1),
        },
        Halfspace {
            normal: vec![ratio(0, 1), ratio(1, 1)],
            offset: ratio(0, 1),
        },
        Halfspace {
            normal: vec![ratio(-1, 1), ratio(-1, 1)],
            offset: ratio(1, 1),
        },
        Halfspace {
            normal: vec![ratio(8, 1), ratio(8, 1)],
            offset: ratio(-4, 1),
        },
    ];
    BoxPolytope::from_halfspaces(2, hs).expect("rank 2 model data")
}

fn main() {
    let bx = model_box();
    let base = UniformGrid::symmetric(6.0, 129).expect("positive width and length");
    let fiber = UniformGrid::new(-8.0, 2.0, 11).expect("ordered endpoints");

    println!("exponent polytope vertices:");
    for v in bx.vertices() {
        let coords: Vec<String> = v.iter().map(format_rational).collect();
        println!("  ({})", coords.join(", "));
    }

    // Flat base weights: the global envelope collapses to the tropical
    // weight in the fiber directions, uniformly in the base variable.
    let flat = RadialWeight::flat(base).expect("flat weight on a valid grid");
    let res = vhat_toy(&bx, &[flat.clone(), flat.clone(), flat], 4, &fiber)
        .expect("three weights for rank 2");
    let trop = TropicalWeight::from_box(&bx).expect("nonempty polytope");

    let mut max_diff = 0.0f64;
    for i0 in 0..fiber.len() {
        for i1 in 0..fiber.len() {
            let expected = trop
                .evaluate(&[fiber.point(i0), fiber.point(i1)])
                .expect("fiber points match the rank");
            for ib in 0..base.len() {
                let got = res.fun.value_at(&[i0, i1, ib]);
                max_diff = max_diff.max((got - expected).abs());
            }
        }
    }
    println!();
    println!("flat-weight cross-check: max |vhat - tropical| = {max_diff:.3e}");
    println!("exponent family size at density 4: {}", res.alphas.len());

    // Curved base weights: richer exponent families can only raise the
    // envelope, and the increments shrink as the lattice fills in.
    let weights = [
        RadialWeight::round_metric(base, ratio(1, 1)).expect("degree 1 weight"),
        RadialWeight::dipped_metric(base).expect("dipped weight"),
        RadialWeight::flat(base).expect("flat weight"),
    ];
    println!();
    println!("{:>8}  {:>8}  {:>22}", "density", "family", "max rise over previous");
    let mut prev: Option<Vec<f64>> = None;
    for d in [2u32, 4, 8, 16] {
        let res = vhat_toy(&bx, &weights, d, &fiber).expect("three weights for rank 2");
        let rise = match &prev {
            Some(old) => res
                .fun
                .values()
                .iter()
                .zip(old)
                .map(|(new, old)| new - old)
                .fold(0.0f64, f64::max),
            None => f64::NAN,
        };
        if prev.is_some() {
            println!("{:>8}  {:>8}  {:>22.6e}", d, res.alphas.len(), rise);
        } else {
            println!("{:>8}  {:>8}  {:>22}", d, res.alphas.len(), "-");
        }
        prev = Some(res.fun.values().to_vec());
    }
}
