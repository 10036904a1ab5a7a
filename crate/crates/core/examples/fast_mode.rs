//! Probabilistic checking at seeded random integer values of q, next to
//! exact checking, with a corrupted relation set as a negative control.
//!
//! ```bash
//! cargo run -p qma --example fast_mode
//! ```

use qma::rmatrix::{builtin, Family};
use qma::ncalgebra::QuantumMatrixAlgebra;
use qma::verifier::{run_suite, CheckKind, Mode, SuiteConfig};

fn main() -> qma::error::Result<()> {
    let mut config = SuiteConfig::family(Family::RttStandard, 2);
    config.checks = CheckKind::parse_list("chn,newton,cayley-hamilton,commutativity")?;
    config.mode = Mode::Fast;
    config.seed = 42;
    let report = run_suite(&config)?;
    println!("sampled q: {:?}", report.aggregate.sampled_q);
    println!("fast run: {}", report.aggregate.status);

    // drop both copies of one relation
    let pair = builtin(Family::RttStandard, 2)?.validate(4).expect("valid pair");
    let alg = QuantumMatrixAlgebra::new(pair)?;
    let target = alg.relations()[2].poly.clone();
    config.dropped_relations = alg
        .relations()
        .iter()
        .filter(|r| r.poly.is_proportional(&target))
        .map(|r| (r.row, r.col))
        .collect();
    for mode in [Mode::Exact, Mode::Fast] {
        config.mode = mode;
        let report = run_suite(&config)?;
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status != qma::verifier::Status::Pass)
            .map(|c| c.name.as_str())
            .collect();
        println!("{} run without {:?}: failing {failed:?}", mode.name(), config.dropped_relations);
    }
    Ok(())
}
