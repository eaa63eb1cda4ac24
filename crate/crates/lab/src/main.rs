fn main() {
    std::process::exit(lehmer_lab::cli::main());
}
