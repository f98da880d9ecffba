fn main() {
    std::process::exit(polsar_entropy::cli::run(std::env::args_os()));
}
