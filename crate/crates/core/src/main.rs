fn main() {
    std::process::exit(dsr::cli::run(std::env::args_os()));
}
