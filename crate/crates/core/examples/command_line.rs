// Drives the command-line front end in process on the bundled data files.

use bellctx::cli;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let h = format!("{data}/h-scenario.json");
    let qc = format!("{data}/qc.json");
    let out = cli::run(["bellctx", "check", "nc", &h, "--behaviour", &qc]);
    eprint!("{}", out.stderr);
    let report: serde_json::Value = serde_json::from_str(&out.stdout)?;
    println!("verdict {}, violation {}", report["verdict"], report["violation"]);
    if out.code != 0 || report["violation"] != "1/40" {
        return Err("unexpected check nc report".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
