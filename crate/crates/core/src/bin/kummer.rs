fn main() {
    std::process::exit(kummer_core::cli::run(std::env::args_os()));
}
