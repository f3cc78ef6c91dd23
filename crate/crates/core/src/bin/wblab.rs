fn main() {
    std::process::exit(wblab::cli::run_from(std::env::args_os()));
}
