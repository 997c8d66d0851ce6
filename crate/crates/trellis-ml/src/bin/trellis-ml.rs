fn main() {
    std::process::exit(trellis_ml::run(std::env::args_os()));
}
