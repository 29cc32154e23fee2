fn main() {
    std::process::exit(mubeq_cli::run(std::env::args_os()));
}
