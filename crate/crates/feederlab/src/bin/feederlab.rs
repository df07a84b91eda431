fn main() {
    std::process::exit(feederlab::cli::run(std::env::args_os()));
}
