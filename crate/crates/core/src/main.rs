use clap::error::ErrorKind;
use clap::Parser;

use callgrid::cli::{self, Cli, ExitStatus};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let status = cli::execute(cli);
    match &status {
        ExitStatus::Success => {}
        ExitStatus::Usage(msg) | ExitStatus::Runtime(msg) => eprintln!("error: {msg}"),
    }
    std::process::exit(status.code());
}
