use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = srcover::cli::Args::parse();
    std::process::exit(srcover::cli::main_with(&args));
}
