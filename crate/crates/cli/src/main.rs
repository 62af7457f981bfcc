fn main() {
    std::process::exit(kerrsense_cli::run(std::env::args()));
}
