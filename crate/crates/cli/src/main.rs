fn main() -> std::process::ExitCode {
    pact_cli::main_with_args(std::env::args_os())
}
