//! Compute the slope-constrained envelope of a dipped radial weight, then
//! sandwich its defect between normalized kernel weights of growing tensor
//! power and print how the gap shrinks.
//!
//! ```text
//! cargo run --example envelope_sandwich
//! ```

use minsing::envelope_1d::{equilibrium_envelope, sandwich_report, RadialWeight, UniformGrid};

fn main() {
    let grid = UniformGrid::symmetric(40.0, 4096).expect("positive width and length");
    let w = RadialWeight::dipped_metric(grid).expect("the dipped weight is admissible");

    let env = equilibrium_envelope(&w).expect("admissible weight");
    let (i_min, min_v) = env
        .v
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let contacts = env.contact.iter().filter(|&&c| c).count();

    println!("weight: {} (degree {})", w.label(), w.degree_f64());
    println!("deepest detachment: v = {min_v:.6} at t = {:.4}", grid.point(i_min));
    println!("contact points: {contacts} of {}", grid.len());

    let m_list = [1u32, 2, 4, 8];
    let report = sandwich_report(&w, &m_list).expect("integer degrees at every power");

    println!();
    println!("{:>3}  {:>14}  {:>14}", "m", "sup(v - v_m)", "sup(v_m - v)");
    for row in &report.rows {
        println!(
            "{:>3}  {:>14.6e}  {:>14.6e}",
            row.m, row.sup_v_minus_vb, row.sup_vb_minus_v
        );
    }
    println!();
    println!(
        "envelope against the best kernel bound: sup(v - max_m v_m) = {:.3e}",
        report.sup_v_minus_best
    );
    println!("the kernel weights squeeze down onto the envelope as m grows.");
}
