fn main() {
    std::process::exit(psikit_cli::run(std::env::args_os()));
}
