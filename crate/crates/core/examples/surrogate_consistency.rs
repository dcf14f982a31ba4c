//! The cross-entropy surrogate's conditional minimizer decodes to the Bayes
//! deferral action on random finite worlds.

use defer_lab::seeds::rng_from;
use defer_lab::surrogates::{conditional_surrogate_minimizer, lce_loss, verify_consistency, ScoreVector};
use defer_lab::worlds::random_atomic_world;

fn main() -> defer_lab::Result<()> {
    // Expected weights (0.2, 0.3, 0.5): deferring is the best action.
    let f = conditional_surrogate_minimizer(&[0.2, 0.3, 0.5])?;
    println!("minimizer scores {:?} -> action {}", f.0, f.predict());

    let scores = ScoreVector(vec![2.0, -1.0, 0.5]);
    println!("L_CE(y=1, expert right) = {:.4}", lce_loss(1, true, &scores)?);
    println!("L_CE(y=1, expert wrong) = {:.4}", lce_loss(1, false, &scores)?);

    let mut rng = rng_from(42);
    let (mut points, mut mismatches) = (0, 0);
    for i in 0..500 {
        let world = random_atomic_world(1 + i % 5, 2 + i % 2, &mut rng);
        let report = verify_consistency(&world, 10_000)?;
        points += report.points;
        mismatches += report.mismatches.len();
    }
    println!("500 worlds, {points} support points, {mismatches} mismatches");
    Ok(())
}
