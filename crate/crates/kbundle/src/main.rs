fn main() {
    std::process::exit(kbundle::cli::main_with_args(std::env::args_os()));
}
