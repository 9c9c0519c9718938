fn main() {
    std::process::exit(sag::cli::run(std::env::args_os()));
}
