//! Disagreement on disagreements on the threshold world: CAL over
//! expert-error predictors, then a consistent classifier-rejector pair.

use defer_lab::active::{dod_run, estimate_theta2, DodParams};
use defer_lab::harness::experiments::dod_classes;
use defer_lab::worlds::{make_fig4_world, World};

fn main() -> defer_lab::Result<()> {
    let world = make_fig4_world();
    let (class_d, class_h, class_r) = dod_classes(100);
    let params = DodParams { rounds: 10, per_round: 4, mc_samples: 10_000, ..DodParams::default() };
    let out = dod_run(&class_d, &class_h, &class_r, &world, &params, 11)?;
    for row in &out.trace {
        println!(
            "round {:2}: {:3} expert labels, {:3} predictors alive, DIS2 mass {:.4}",
            row.round, row.labels_used, row.version_space_size, row.dis_mass_estimate
        );
    }
    let system = out.system(&class_h, &class_r);
    println!("chosen h={} r={} consistent={}", out.choice.h, out.choice.r, out.choice.consistent);
    println!("exact risk {:.4}", world.exact_risk(&system).unwrap_or(f64::NAN));

    // Member 30 of the grid cuts at exactly 0.3.
    let theta = estimate_theta2(&class_d, 30, &world, &[0.01, 0.02, 0.05, 0.1, 0.2], 20_000, 3)?;
    println!("estimated disagreement coefficient {theta:.2}");
    Ok(())
}
