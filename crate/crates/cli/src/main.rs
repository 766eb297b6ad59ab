fn main() {
    std::process::exit(holdup_cli::run_cli(std::env::args_os()));
}
