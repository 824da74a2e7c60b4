fn main() {
    std::process::exit(bshq_core::cli::run(std::env::args_os()));
}
