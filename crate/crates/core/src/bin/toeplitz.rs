fn main() {
    std::process::exit(sparse_toeplitz::harness::cli::cli_main(std::env::args_os()));
}
