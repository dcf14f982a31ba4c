//! Trains the joint cross-entropy model and the staged pipeline on the
//! one-dimensional threshold world and compares their test risk.

use defer_lab::deferral::deferral_loss_01;
use defer_lab::learners::{decode_model, train_joint, train_staged, Architecture, Network, ScoreModel, TrainConfig};
use defer_lab::worlds::{make_fig4_world, sample_labeled, World};
use defer_lab::Sample;

fn main() -> defer_lab::Result<()> {
    let world = make_fig4_world();
    let train = sample_labeled(&world, 1000, 1)?;
    let test = sample_labeled(&world, 5000, 2)?;
    let cfg = TrainConfig { learning_rate: 1.0, epochs: 300, batch_size: 50, seed: 3, ..TrainConfig::default() };

    let joint = decode_model(train_joint(ScoreModel::new(Architecture::Linear, 1, 2, &cfg), &train, &cfg)?);
    println!("joint test risk:  {:.4}", deferral_loss_01(&joint, &test)?);
    println!("joint exact risk: {:.4}", world.exact_risk(&joint).unwrap_or(f64::NAN));

    let y_only: Vec<Sample> = train.iter().map(Sample::without_expert).collect();
    let staged = train_staged(
        Network::new(Architecture::Linear, 1, 2, 0.1, 4),
        Network::new(Architecture::Linear, 1, 1, 0.1, 5),
        &y_only,
        &train,
        &cfg,
    )?;
    println!("staged test risk: {:.4}", deferral_loss_01(&staged, &test)?);
    for x in [0.1, 0.25, 0.35, 0.8] {
        println!(
            "  x={x}: confidence {:.3}, P(expert right) {:.3}",
            staged.confidence(&[x]),
            staged.expert_correct_probability(&[x])
        );
    }
    Ok(())
}
