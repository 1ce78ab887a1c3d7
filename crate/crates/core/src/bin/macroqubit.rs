fn main() {
    std::process::exit(macroqubit::cli::main_with_args(std::env::args_os()));
}
