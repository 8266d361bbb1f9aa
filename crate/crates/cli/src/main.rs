fn main() {
    std::process::exit(atomvolt_cli::run(std::env::args_os()));
}
