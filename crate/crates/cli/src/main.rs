fn main() {
    let code = setstab_cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
