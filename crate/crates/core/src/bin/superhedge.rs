fn main() {
    std::process::exit(superhedge::cli::main_with_args(std::env::args_os()));
}
