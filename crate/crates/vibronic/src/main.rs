fn main() {
    std::process::exit(vibronic::cli::run(std::env::args_os()));
}
