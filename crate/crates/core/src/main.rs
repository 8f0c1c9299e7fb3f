fn main() {
    std::process::exit(lrsdp::cli::run_main(std::env::args().collect()));
}
