fn main() {
    std::process::exit(korobov::cli::run(std::env::args_os()));
}
