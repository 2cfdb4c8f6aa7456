fn main() {
    std::process::exit(empso::runner::cli(std::env::args_os()));
}
