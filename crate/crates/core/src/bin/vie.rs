fn main() {
    std::process::exit(vie_core::cli::run(std::env::args_os()));
}
