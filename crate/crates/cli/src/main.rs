use tracing_subscriber::EnvFilter;

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::from_env("AGV_LOG"))
        .with_writer(std::io::stderr)
        .init();
    std::process::exit(agv_cli::run(std::env::args_os()));
}
