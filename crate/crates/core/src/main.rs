fn main() {
    std::process::exit(concurrence_core::cli::main_with_args(std::env::args_os()));
}
