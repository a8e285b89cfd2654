fn main() {
    std::process::exit(laplace_toda::cli::run(std::env::args_os()));
}
