fn main() {
    std::process::exit(hyperramsey::run_cli(std::env::args_os()));
}
