fn main() {
    std::process::exit(circ_core::cli::main());
}
