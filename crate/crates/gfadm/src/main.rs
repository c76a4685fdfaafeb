fn main() {
    std::process::exit(gfadm::cli::main_with_args(std::env::args_os()));
}
