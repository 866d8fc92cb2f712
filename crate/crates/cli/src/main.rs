fn main() {
    std::process::exit(latsym_cli::run(std::env::args_os()));
}
