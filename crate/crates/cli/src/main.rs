fn main() {
    std::process::exit(gps_cli::main_with_args(std::env::args_os()));
}
