fn main() {
    std::process::exit(apdim_core::cli::main_with(std::env::args_os()));
}
