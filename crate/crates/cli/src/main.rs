fn main() {
    std::process::exit(affred_cli::main_with_args(std::env::args_os()));
}
