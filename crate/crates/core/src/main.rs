fn main() {
    std::process::exit(phasestab::cli::run(std::env::args_os()));
}
