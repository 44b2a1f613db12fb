fn main() {
    std::process::exit(vremfl::cli::run(std::env::args_os()));
}
