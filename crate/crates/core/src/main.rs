fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, _) = relhyp::cli::run(&argv);
    std::process::exit(code);
}
