fn main() {
    std::process::exit(liouville_ep_cli::main_with_args(std::env::args_os()));
}
