fn main() {
    std::process::exit(dramcam::cli::main_with_args(std::env::args_os()));
}
