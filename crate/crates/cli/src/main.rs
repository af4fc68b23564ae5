fn main() {
    std::process::exit(multipure_cli::run(std::env::args_os()));
}
