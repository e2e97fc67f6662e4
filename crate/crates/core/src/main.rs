fn main() { std::process::exit(nash_squeeze::cli::run(std::env::args())) }
