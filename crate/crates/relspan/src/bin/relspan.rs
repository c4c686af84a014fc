fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(relspan::cli::dispatch(&args[1..]));
}
