fn main() {
    let code = sbm_core::cli::run(std::env::args().collect());
    std::process::exit(code);
}
