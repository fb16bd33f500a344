//! Thin binary wrapper around the library's CLI.

fn main() {
    std::process::exit(convo_breakdown::cli::run(std::env::args_os()));
}
