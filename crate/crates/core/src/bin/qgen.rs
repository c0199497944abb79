fn main() {
    std::process::exit(qgen::cli::main(std::env::args()));
}
