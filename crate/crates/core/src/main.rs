fn main() {
    std::process::exit(cblocks::cli::main_with(std::env::args_os()));
}
