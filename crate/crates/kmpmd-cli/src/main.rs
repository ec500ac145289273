fn main() {
    std::process::exit(kmpmd_cli::cli::cli_main(std::env::args_os()));
}
