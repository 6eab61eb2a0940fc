fn main() {
    std::process::exit(bregman_kaczmarz::cli::main());
}
