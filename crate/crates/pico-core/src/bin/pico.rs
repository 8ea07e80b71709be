fn main() {
    std::process::exit(pico_core::cli::run(std::env::args_os()));
}
