fn main() {
    std::process::exit(cbm_harness::cli::run(std::env::args_os()));
}
