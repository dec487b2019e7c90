use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = cheeger_mix::cli::run(std::env::args().collect(), &mut lock);
    let _ = lock.flush();
    std::process::exit(code);
}
