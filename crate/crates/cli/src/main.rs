fn main() {
    std::process::exit(bellman_lab_cli::app::main(std::env::args_os()));
}
