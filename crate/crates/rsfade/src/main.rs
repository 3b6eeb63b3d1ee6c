use clap::Parser;
use rsfade::cli::{resolve, run, Cli};

fn main() {
    // clap handles --help/--version and exits 2 on malformed flags.
    let cli = Cli::parse();
    let code = match resolve(cli).and_then(|config| run(&config)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
