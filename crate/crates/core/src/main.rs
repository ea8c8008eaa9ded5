fn main() {
    std::process::exit(mkdv_imethod::cli::run(std::env::args_os()));
}
