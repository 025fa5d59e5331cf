use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_seed = std::env::var("LAMPTREE_SEED").ok();
    let code = lamptree_cli::run(
        std::env::args_os(),
        env_seed,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code)
}
