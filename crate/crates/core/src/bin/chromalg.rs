fn main() {
    std::process::exit(chromalg::cli::run(std::env::args_os()));
}
