use clap::Parser;

use ies_core::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        let body = serde_json::json!({ "error": e.code(), "message": e.to_string() });
        eprintln!("{body}");
        std::process::exit(e.exit_code());
    }
}
