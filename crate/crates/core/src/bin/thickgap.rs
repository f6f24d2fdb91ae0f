fn main() {
    std::process::exit(thickgap::cli::run(std::env::args_os()));
}
