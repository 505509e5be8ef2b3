fn main() {
    std::process::exit(antclust::cli::dispatch(std::env::args_os()));
}
