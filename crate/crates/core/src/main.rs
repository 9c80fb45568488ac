fn main() {
    std::process::exit(mulrk::cli::main_with(std::env::args_os()));
}
