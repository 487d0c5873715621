fn main() {
    std::process::exit(meshae::cli::run(std::env::args_os()));
}
