fn main() {
    std::process::exit(conformal_eds::cli::main_with_args(std::env::args_os()));
}
