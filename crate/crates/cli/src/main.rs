use clap::Parser;

fn main() {
    let cli = dell_cli::Cli::parse();
    std::process::exit(dell_cli::run(cli));
}
