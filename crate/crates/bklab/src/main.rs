use std::io::Write;

use clap::Parser;

fn main() {
    let cli = bklab::commands::Cli::parse();
    let out = bklab::commands::run(&cli);
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
