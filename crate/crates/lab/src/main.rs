fn main() {
    std::process::exit(kms_lab::cli::run(std::env::args_os()));
}
