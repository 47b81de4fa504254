fn main() {
    std::process::exit(mkp::cli::run(std::env::args_os()));
}
