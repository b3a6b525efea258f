fn main() {
    std::process::exit(cutplane::cli::main_with_args(std::env::args_os()));
}
