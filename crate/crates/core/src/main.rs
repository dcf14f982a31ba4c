fn main() {
    std::process::exit(defer_lab::harness::cli::main());
}
