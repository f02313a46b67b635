//! Drive the experiment runner from a config string and write the report,
//! CSV and plots into a directory (first argument, default `./longlab-out`).

use longitude_lab::experiment::{run, write_outputs, ExperimentConfig};

const CONFIG: &str = "\
kind = shrink-chain, bernstein-audit, appendix-geodesics
seed = 7
appendix.samples = 10000
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "longlab-out".into());
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let report = run(&cfg)?;
    for r in &report.records {
        println!("{:5} {}/{} = {:e}", if r.pass { "pass" } else { "FAIL" }, r.experiment, r.name, r.measured);
    }
    let out = write_outputs(&report, std::path::Path::new(&dir))?;
    println!("config hash {}", report.config_hash);
    println!("wrote {}, {} and {} plots", out.json.display(), out.csv.display(), out.plots.len());
    Ok(())
}
