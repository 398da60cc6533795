fn main() {
    std::process::exit(linked_ideals::cli::main());
}
