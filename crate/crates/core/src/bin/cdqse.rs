fn main() {
    std::process::exit(cdqse::cli::run(std::env::args_os()));
}
