fn main() {
    std::process::exit(hlmax_cli::run_cli(std::env::args_os()));
}
