fn main() {
    std::process::exit(freudhc::cli::main_with(std::env::args_os()));
}
