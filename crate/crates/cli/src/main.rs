fn main() {
    std::process::exit(geoqm_cli::run(std::env::args_os()));
}
