fn main() {
    std::process::exit(ckn_core::cli::dispatch(std::env::args_os()));
}
