fn main() {
    std::process::exit(weakot::cli::main_with_args(std::env::args_os()));
}
