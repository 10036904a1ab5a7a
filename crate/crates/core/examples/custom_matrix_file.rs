//! Writes a pair to the text matrix format, reads it back and runs the
//! suite on the files, as the command line tool does with
//! `--r-matrix` and `--f-matrix`.
//!
//! ```bash
//! cargo run -p qma --example custom_matrix_file
//! ```

use qma::parse::{read_matrix, write_matrix};
use qma::rmatrix::{builtin, Family};
use qma::verifier::{run_suite, CheckKind, PairSource, SuiteConfig};

fn main() -> qma::error::Result<()> {
    let pair = builtin(Family::InverseTwistStandard, 2)?;
    let dir = std::env::temp_dir().join(format!("qma-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| qma::error::Error::Input(e.to_string()))?;
    let (r_path, f_path) = (dir.join("r.txt"), dir.join("f.txt"));
    let write = |p: &std::path::Path, text: String| std::fs::write(p, text).map_err(|e| qma::error::Error::Input(e.to_string()));
    write(&r_path, write_matrix(&pair.r)?)?;
    write(&f_path, write_matrix(&pair.f)?)?;

    let text = std::fs::read_to_string(&f_path).map_err(|e| qma::error::Error::Input(e.to_string()))?;
    println!("{text}");
    assert_eq!(read_matrix(&text)?, pair.f);

    let mut config = SuiteConfig::family(Family::Custom, 2);
    config.source = PairSource::Files { r: r_path, f: f_path };
    config.checks = CheckKind::parse_list("chn,newton,cayley-hamilton")?;
    let report = run_suite(&config)?;
    for c in &report.checks {
        println!("{:<20} {:?}", c.name, c.status);
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
