fn main() {
    std::process::exit(qpe::cli::main_with_args(std::env::args_os()));
}
