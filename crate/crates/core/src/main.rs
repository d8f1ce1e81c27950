fn main() {
    std::process::exit(hardy_sim::cli::main_with_args(std::env::args_os()));
}
