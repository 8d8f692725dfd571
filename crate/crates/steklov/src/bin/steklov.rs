fn main() {
    std::process::exit(steklov::cli::run(std::env::args().collect()));
}
