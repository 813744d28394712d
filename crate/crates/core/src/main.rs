fn main() {
    std::process::exit(mumsep::cli::run());
}
