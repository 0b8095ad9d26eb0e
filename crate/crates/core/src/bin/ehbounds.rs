fn main() {
    std::process::exit(ehbounds::cli::main_with_args(std::env::args_os()));
}
