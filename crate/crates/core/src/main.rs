fn main() {
    std::process::exit(lasserre_sym::cli::run(std::env::args_os()));
}
