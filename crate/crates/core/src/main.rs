fn main() {
    std::process::exit(medrx::cli::run_command(std::env::args_os()));
}
