fn main() {
    std::process::exit(reidemeister::cli::run(std::env::args_os()));
}
