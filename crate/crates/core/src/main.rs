fn main() {
    std::process::exit(railsim::cli::run(std::env::args_os()));
}
