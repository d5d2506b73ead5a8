fn main() {
    std::process::exit(bcurrent_cli::run(std::env::args_os()));
}
