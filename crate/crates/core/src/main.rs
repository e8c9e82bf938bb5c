fn main() {
    std::process::exit(spinqc::cli::main());
}
