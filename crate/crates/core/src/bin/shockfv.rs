fn main() {
    std::process::exit(shockfv::cli::main_with_args(std::env::args_os()));
}
