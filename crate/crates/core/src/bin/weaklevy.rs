fn main() {
    std::process::exit(weaklevy::cli::run_cli(std::env::args_os()));
}
