use std::process::ExitCode;

fn main() -> ExitCode {
    match influencer_cartels::cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
