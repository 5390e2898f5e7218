fn main() {
    std::process::exit(mixcrit::cli::run(std::env::args_os()));
}
