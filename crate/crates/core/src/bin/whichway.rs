fn main() {
    std::process::exit(whichway::cli::main_with_args(std::env::args_os()));
}
