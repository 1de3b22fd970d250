fn main() {
    std::process::exit(coastal_kriging::cli::run(std::env::args_os()));
}
