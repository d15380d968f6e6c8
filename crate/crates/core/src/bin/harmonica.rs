fn main() {
    std::process::exit(harmonica::cli::run(std::env::args_os()));
}
