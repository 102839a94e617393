use clap::Parser;

use ion_cavity::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match cli::parse_config(cli).and_then(|cfg| cli::run(&cfg)) {
        Ok(report) => {
            println!("wrote {}", report.output.display());
            println!("wrote {}", report.sidecar.display());
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(cli::exit_code(&err));
        }
    }
}
