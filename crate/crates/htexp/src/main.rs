use clap::Parser;

fn main() {
    let cli = htexp::cli::Cli::parse();
    std::process::exit(htexp::cli::run(cli));
}
