use std::io;

fn main() {
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let code = rigid_cli::execute_command(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
