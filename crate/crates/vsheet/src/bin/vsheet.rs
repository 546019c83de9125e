use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("VSHEET_LOG")).init();
    ExitCode::from(vsheet::cli::run_from(std::env::args_os()))
}
