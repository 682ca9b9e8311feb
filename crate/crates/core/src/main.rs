fn main() {
    std::process::exit(regudist::cli::main_with_args(std::env::args_os()));
}
