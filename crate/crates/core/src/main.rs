fn main() {
    std::process::exit(codeco::cli::main());
}
