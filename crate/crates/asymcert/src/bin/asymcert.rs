use std::process::exit;

use asymcert::cli::{run, Cli};
use clap::Parser;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and exit 0; anything else
            // is an input error under the exit-code contract.
            if e.use_stderr() {
                eprint!("{e}");
                exit(asymcert::cli::EXIT_INPUT_ERROR);
            }
            print!("{e}");
            exit(0);
        }
    };
    let code = run(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    exit(code);
}
