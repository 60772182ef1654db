fn main() {
    std::process::exit(exactcsg_service::cli::run(std::env::args_os()));
}
