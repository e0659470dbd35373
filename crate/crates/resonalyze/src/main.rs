fn main() {
    std::process::exit(resonalyze::cli::main());
}
