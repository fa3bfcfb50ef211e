fn main() {
    std::process::exit(aerialnet::harness::cli::run(std::env::args_os()));
}
