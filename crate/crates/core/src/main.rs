fn main() {
    std::process::exit(plaquette::cli::run(std::env::args_os()));
}
