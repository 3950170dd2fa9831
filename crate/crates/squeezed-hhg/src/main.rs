fn main() {
    std::process::exit(squeezed_hhg::cli::run());
}
