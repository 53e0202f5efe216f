fn main() {
    std::process::exit(lifshitz_cp::cli::run(std::env::args_os()));
}
