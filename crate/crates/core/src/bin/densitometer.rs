fn main() {
    std::process::exit(densitometer::cli::run(std::env::args_os()));
}
