fn main() {
    std::process::exit(mgvqe_harness::cli::main_with_args(std::env::args_os()));
}
