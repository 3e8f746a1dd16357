use clap::Parser;

fn main() {
    let cli = realchern::cli::Cli::parse();
    std::process::exit(realchern::cli::run(cli));
}
