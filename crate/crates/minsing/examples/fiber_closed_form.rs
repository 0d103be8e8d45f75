//! Evaluate the fiber integral both ways, through the gamma-function closed
//! form and through adaptive quadrature, and print the relative error at a
//! few anchor points together with the volume normalization constants.
//!
//! ```text
//! cargo run --example fiber_closed_form
//! ```

use minsing::fiber_integral::{
    closed_form, normalization_constant, numeric_integral, FiberProblem, QuadratureSpec,
};

fn main() {
    let spec = QuadratureSpec::default();

    let cases = [
        (vec![0.0], vec![0.0, 0.0]),
        (vec![0.5], vec![0.3, -0.2]),
        (vec![0.5, 0.5], vec![0.0, 0.0, 0.0]),
        (vec![-0.25, 0.75], vec![1.0, -0.5, 0.25]),
        (vec![0.0, 0.0, 0.0], vec![0.1, 0.2, 0.3, 0.4]),
    ];

    println!(
        "{:>4}  {:>22}  {:>22}  {:>10}  {:>7}",
        "r", "closed form", "numeric", "rel err", "panels"
    );
    for (t, phi) in cases {
        let p = FiberProblem::new(t, phi).expect("anchor points sit inside the window");
        let exact = closed_form(&p);
        let num = numeric_integral(&p, &spec).expect("quadrature budget suffices");
        let rel = ((num.value - exact) / exact).abs();
        println!(
            "{:>4}  {:>22.15e}  {:>22.15e}  {:>10.2e}  {:>7}",
            p.rank(),
            exact,
            num.value,
            rel,
            num.panels,
        );
    }

    println!();
    println!("normalization constants (should match (2 pi)^r / r! and stay");
    println!("independent of the reference potential):");
    for r in 1..=3usize {
        let phi = vec![0.25; r + 1];
        let c = normalization_constant(r, &phi, &spec).expect("quadrature budget suffices");
        let expected = (std::f64::consts::TAU).powi(r as i32)
            / (1..=r as u32).product::<u32>() as f64;
        println!("  r = {r}: {:.12e}  (expected {expected:.12e})", c.value);
    }
}
