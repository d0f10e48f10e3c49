fn main() {
    let code = awqpe::cli::dispatch(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
