fn main() {
    std::process::exit(eplab::cli::cli_main(std::env::args_os()));
}
