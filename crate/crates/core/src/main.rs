fn main() {
    std::process::exit(cgf_bounds::cli::run(std::env::args_os()));
}
