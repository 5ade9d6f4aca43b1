fn main() {
    std::process::exit(viralens::cli::run(std::env::args_os()));
}
