fn main() {
    std::process::exit(tripsqrt::cli::run(std::env::args_os()));
}
