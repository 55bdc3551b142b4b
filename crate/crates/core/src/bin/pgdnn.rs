fn main() {
    std::process::exit(pgdnn::cli::cli_main(std::env::args_os()));
}
