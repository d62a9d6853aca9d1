fn main() {
    std::process::exit(choquard_lab::cli::run(std::env::args_os()));
}
