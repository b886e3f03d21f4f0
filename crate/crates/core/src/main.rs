fn main() {
    std::process::exit(unifilter::cli::run(std::env::args_os()));
}
