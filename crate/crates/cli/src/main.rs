fn main() {
    std::process::exit(rieszcap_cli::run_cli(std::env::args()));
}
