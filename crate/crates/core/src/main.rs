fn main() {
    std::process::exit(rankguard::cli::run(std::env::args_os()));
}
