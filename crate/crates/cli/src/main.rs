use std::io::Write;

fn main() {
    let outcome = qslab_cli::run(std::env::args_os(), std::env::var(qslab_cli::SEED_ENV).ok());
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr);
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", outcome.stdout);
    let _ = out.flush();
    std::process::exit(outcome.code);
}
