use clap::Parser;

fn main() {
    let cli = thermocap_cli::Cli::parse();
    std::process::exit(thermocap_cli::main_with(cli));
}
