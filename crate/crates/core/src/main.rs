fn main() {
    std::process::exit(svms::cli::cli_main(std::env::args_os()));
}
