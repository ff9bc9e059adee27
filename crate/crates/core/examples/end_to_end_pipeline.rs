//! Run the whole configured pipeline on the bundled synthetic panel and list
//! what it writes.

use std::path::Path;

use gridrisk::io::{run_pipeline_file, RunOptions};

fn main() -> gridrisk::Result<()> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/config.toml");
    let out = tempfile::tempdir().expect("temporary directory");
    let run = run_pipeline_file(
        &config,
        &RunOptions {
            out_dir: Some(out.path().to_path_buf()),
            ..RunOptions::default()
        },
    )?;
    for f in &run.files {
        println!("{:<13} {:>8} bytes", f.name, f.contents.len());
    }
    let report = run.report.as_ref().expect("report stage ran");
    println!("DGC {} at alpha {}", report.dgc, report.alpha);
    println!("\n{}", run.file("network.dot").unwrap_or_default());
    Ok(())
}
