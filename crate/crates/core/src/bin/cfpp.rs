fn main() {
    std::process::exit(cfpp::cli::run(std::env::args_os()));
}
