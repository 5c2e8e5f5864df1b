fn main() -> std::process::ExitCode { erlab::cli::main() }
