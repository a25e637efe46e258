use clap::Parser;

fn main() {
    let cli = irvec::cli::IrvecCli::parse();
    if let Err(e) = irvec::cli::run_irvec(cli) {
        eprintln!("error: {}", e);
        std::process::exit(1);
    }
}
