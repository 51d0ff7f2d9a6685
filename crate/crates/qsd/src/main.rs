fn main() {
    std::process::exit(qsd::cli::run());
}
