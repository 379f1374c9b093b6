fn main() {
    std::process::exit(skewdiff_cli::main_with_args(std::env::args_os()));
}
