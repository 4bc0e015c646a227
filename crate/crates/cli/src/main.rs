fn main() {
    std::process::exit(vfr_ladder::cli::run(std::env::args_os()));
}
