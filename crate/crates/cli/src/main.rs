use clap::Parser;

fn main() {
    let cli = dyson_cli::Cli::parse();
    if let Err(e) = dyson_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
