fn main() {
    std::process::exit(elastica::cli::main(std::env::args_os()));
}
