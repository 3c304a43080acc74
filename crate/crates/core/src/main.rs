fn main() {
    let code = cosetmap::cli::run(std::env::args_os());
    std::process::exit(code);
}
