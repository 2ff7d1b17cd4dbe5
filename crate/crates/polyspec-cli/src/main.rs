//! `polyspec` binary.

fn main() {
    std::process::exit(polyspec_cli::run(std::env::args_os()));
}
