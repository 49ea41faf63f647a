fn main() {
    std::process::exit(sphfn::cli::run(std::env::args_os()));
}
