fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(merosub::cli::run_command(&argv));
}
