fn main() {
    std::process::exit(screenaudit::cli::run());
}
