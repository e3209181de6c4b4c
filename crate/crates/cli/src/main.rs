use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = lcakit_cli::run(std::env::args_os());
    if code == lcakit_cli::EXIT_USAGE {
        eprint!("{report}");
    } else {
        print!("{report}");
    }
    ExitCode::from(code as u8)
}
