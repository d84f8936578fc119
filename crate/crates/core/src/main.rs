fn main() {
    std::process::exit(score_select::cli::run(std::env::args_os()));
}
