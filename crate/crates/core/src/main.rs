use clap::Parser;

fn main() {
    let cli = chanapprox::cli::Cli::parse();
    std::process::exit(chanapprox::cli::run(&cli));
}
