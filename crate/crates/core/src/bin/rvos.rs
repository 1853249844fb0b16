fn main() {
    std::process::exit(rvos_core::cli::main_with_exit_code());
}
