fn main() {
    std::process::exit(pirpsi::cli::run(std::env::args_os()));
}
