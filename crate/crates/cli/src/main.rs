fn main() {
    std::process::exit(frg_cli::main_with_args(std::env::args_os()));
}
