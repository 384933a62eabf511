fn main() {
    std::process::exit(zitterlab::cli::run(std::env::args().skip(1).collect()));
}
