use clap::Parser;

fn main() {
    let cli = bsdp_cli::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = bsdp_cli::run(cli, &mut out) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
