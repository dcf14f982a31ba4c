//! The deferral loss on a handful of samples, with and without extra costs.

use defer_lab::deferral::{decode_pair, deferral_loss_01, deferral_loss_general, encode_action, CostSpec, FnSystem};
use defer_lab::Sample;

fn main() -> defer_lab::Result<()> {
    // Predict class 2 everywhere and defer to the expert left of 0.5.
    let system = FnSystem::new(|_: &[f64]| 2, |x: &[f64]| x[0] < 0.5);
    let data = vec![
        Sample::new(vec![0.1], 1, Some(1)), // deferred, expert right
        Sample::new(vec![0.2], 2, Some(1)), // deferred, expert wrong
        Sample::new(vec![0.7], 2, Some(1)), // predicted, right
        Sample::new(vec![0.9], 1, None),    // predicted, wrong; no expert label needed
    ];
    println!("0-1 deferral loss: {}", deferral_loss_01(&system, &data)?);

    // Consulting the expert costs 0.1 per query.
    let costs = CostSpec::new(|_, _, _| 0.1, |_, _, _| 0.0);
    println!("with query cost:   {}", deferral_loss_general(&system, &data, &costs)?);

    // The (K+1)-way action view used by the surrogates.
    for action in 1..=3 {
        let (label, defer) = decode_pair(action, 2)?;
        println!("action {action} -> label {label}, defer {defer} -> action {}", encode_action(label, defer, 2));
    }
    Ok(())
}
