use clap::Parser;

fn main() {
    let cli = lanpower_cli::commands::Cli::parse();
    if let Err(e) = lanpower_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
