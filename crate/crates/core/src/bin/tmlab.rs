fn main() {
    std::process::exit(tmlab::cli::main_with_args(std::env::args_os()));
}
