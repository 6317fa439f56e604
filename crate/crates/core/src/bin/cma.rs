fn main() {
    let (code, out) = cma::cli::dispatch(std::env::args_os());
    if code != 2 {
        print!("{out}");
    } else {
        eprint!("{out}");
    }
    std::process::exit(code);
}
