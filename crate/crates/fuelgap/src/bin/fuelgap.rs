fn main() {
    std::process::exit(fuelgap::cli::run(std::env::args_os()));
}
