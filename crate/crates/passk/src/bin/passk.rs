fn main() {
    std::process::exit(passk::cli::run(std::env::args_os()));
}
