fn main() {
    std::process::exit(pathmarker::cli::main(std::env::args_os()));
}
