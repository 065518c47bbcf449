fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let seed = std::env::var("RENV_SEED").ok();
    std::process::exit(renv_cli::main_with(&argv, seed.as_deref()));
}
