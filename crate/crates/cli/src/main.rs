fn main() {
    std::process::exit(lagstab_cli::dispatch(std::env::args_os()));
}
