//! Rejector disagreement on the two-point counterexample: the estimated
//! disagreement mass stays near 0.5 no matter how many labels are spent.

use defer_lab::active::{rejector_disagreement_run, DisagreementParams};
use defer_lab::worlds::make_cal_counterexample_world;

fn main() -> defer_lab::Result<()> {
    let cal = make_cal_counterexample_world();
    let params = DisagreementParams { rounds: 20, per_round: 2, mc_samples: 10_000, ..DisagreementParams::default() };
    let out = rejector_disagreement_run(&cal.classifiers, &cal.rejectors, &cal.world, &params, 0)?;
    println!("round labels |V| dis_mass");
    for row in &out.trace {
        println!("{:5} {:6} {:3} {:.4}", row.round, row.labels_used, row.version_space_size, row.dis_mass_estimate);
    }
    Ok(())
}
