fn main() {
    let code = sasakigeo::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code as i32);
}
