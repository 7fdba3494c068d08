fn main() -> std::process::ExitCode {
    linq::bench::cli::main_with_args(std::env::args_os())
}
