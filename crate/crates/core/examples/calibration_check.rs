//! The calibration inequality psi(excess 0-1 risk) <= excess surrogate risk
//! on random conditional distributions and scores, plus a gradient check.

use defer_lab::surrogates::{calibration_psi, gradient_check, verify_calibration, CalibrationSpec};

fn main() -> defer_lab::Result<()> {
    let spec = CalibrationSpec::cross_entropy(1.0, 10);
    for x in [0.01, 0.1, 0.5, 1.0] {
        println!("psi({x}) = {:.6}", calibration_psi(x, &spec)?);
    }
    let report = verify_calibration(10_000, 7);
    println!("{} trials, {} violations", report.trials, report.violations);

    let grad = gradient_check(1_000, 7, 1e-4, false);
    println!("gradient: max relative error {:.2e} (passed: {})", grad.max_relative_error, grad.passed);
    Ok(())
}
