fn main() {
    std::process::exit(c0ip::cli::main());
}
