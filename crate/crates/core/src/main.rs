fn main() {
    std::process::exit(ara_nav::cli::main());
}
