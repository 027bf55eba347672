fn main() {
    std::process::exit(macroforge_cli::dispatch(std::env::args_os()));
}
