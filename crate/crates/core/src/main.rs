use clap::Parser;

fn main() {
    let cli = gdil::cli::Cli::parse();
    std::process::exit(gdil::cli::run(&cli));
}
