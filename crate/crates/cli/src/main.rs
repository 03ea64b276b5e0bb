fn main() {
    std::process::exit(evanescent_cli::run(std::env::args_os().skip(1)));
}
