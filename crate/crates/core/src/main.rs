fn main() {
    std::process::exit(ellis_envelope::cli::run(std::env::args_os()));
}
