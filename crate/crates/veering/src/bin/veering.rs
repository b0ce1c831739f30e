fn main() {
    std::process::exit(veering::cli::run_command(std::env::args_os()));
}
