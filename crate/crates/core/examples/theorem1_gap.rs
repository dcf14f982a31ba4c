//! Staged vs. joint ERM as classifier capacity grows: the exact gap on the
//! worst-case worlds, and the gap on random worlds against its upper bound.

use defer_lab::harness::experiments::{theorem1_lower_bound, theorem1_upper_bound};

fn main() -> defer_lab::Result<()> {
    let eps = 0.1;
    println!("d  staged   joint   (1-eps)/(d+1)");
    for d in 1..=5 {
        let (staged, joint) = theorem1_lower_bound(d, eps)?;
        println!("{d}  {staged:.4}   {joint:.4}  {:.4}", (1.0 - eps) / (d as f64 + 1.0));
    }

    println!("\nrandom worlds: d(H) d(R) cases max_gap bound");
    for row in theorem1_upper_bound(200, 5, 1)? {
        println!(
            "  {} {} {:4} {:.4} {:.4}",
            row.classifier_d, row.rejector_d, row.cases, row.max_gap, row.bound
        );
    }
    Ok(())
}
