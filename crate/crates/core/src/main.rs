fn main() {
    std::process::exit(boxmf::cli::run(std::env::args_os()));
}
