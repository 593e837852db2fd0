fn main() {
    std::process::exit(autoqec::cli::run());
}
