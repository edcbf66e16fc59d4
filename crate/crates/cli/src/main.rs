use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, out) = deligne_cli::run(&argv);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
