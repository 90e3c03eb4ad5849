use sphinv_cli::{run, CliError};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let argv: Vec<String> = std::env::args().collect();
    match run(&argv) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            println!("{} finished in {:.2} s; outputs in {}", m.command, m.wall_clock_seconds, outcome.out_dir.display());
            for f in &m.outputs {
                println!("  {f}");
            }
            println!("{}", serde_json::to_string_pretty(&m.summary).unwrap_or_default());
        }
        Err(CliError::Usage(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
