//! Driving the command-line front end from code: a flat config file plus
//! overrides, resolved, validated and run into a temporary directory.

use std::path::Path;

use elastica::cli::{run, validate_file, CommandKind, RunConfig};

fn main() -> elastica::Result<()> {
    let dir = std::env::temp_dir().join("elastica-config-example");
    let text = format!(
        "command = \"penalized\"\n# closed data\np1 = [0, 0]\nv0 = [1, 0]\nv1 = [1, 0]\nlambda = 2.0\noutput_dir = \"{}\"\n",
        dir.display()
    );
    let path = Path::new("penalized.toml");
    println!("diagnostics for a valid file: {:?}", validate_file(path, &text));
    println!("diagnostics for lambda = -1:");
    for d in validate_file(path, &text.replace("lambda = 2.0", "lambda = -1")) {
        println!("  {d}");
    }

    let overrides = [("n".to_string(), "256".to_string())];
    let cfg = RunConfig::resolve(CommandKind::Penalized, Some((path, &text)), &overrides).expect("valid config");
    let out = run(&cfg)?;
    println!("\nconverged: {}, files:", out.converged);
    for f in &out.files {
        println!("  {}", dir.join(f).display());
    }
    Ok(())
}
