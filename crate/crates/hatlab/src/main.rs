fn main() {
    std::process::exit(hatlab::cli::main());
}
