fn main() {
    std::process::exit(ellipcert_cli::run(std::env::args_os()));
}
