fn main() {
    std::process::exit(dlmult::cli::run(std::env::args_os()));
}
