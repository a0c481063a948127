use clap::Parser;

fn main() {
    // clap handles --help/--version (exit 0) and usage errors (exit 2)
    let cli = twrc_cli::Cli::parse();
    if let Err(e) = twrc_cli::run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
