fn main() {
    std::process::exit(deltascale::cli::run_from_env());
}
