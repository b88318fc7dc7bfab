fn main() {
    std::process::exit(resolvent_workbench::cli::run(std::env::args_os()));
}
