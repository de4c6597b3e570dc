use clap::Parser;

fn main() {
    let cli = stre::cli::Cli::parse();
    if let Err(e) = stre::cli::run(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
