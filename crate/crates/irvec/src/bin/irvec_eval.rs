use clap::Parser;

fn main() {
    let cli = irvec::cli::EvalCli::parse();
    if let Err(e) = irvec::cli::run_eval(cli) {
        eprintln!("error: {}", e);
        std::process::exit(1);
    }
}
