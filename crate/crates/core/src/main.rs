fn main() {
    std::process::exit(hopf_futaki::cli::run(std::env::args_os()));
}
