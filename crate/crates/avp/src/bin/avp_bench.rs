fn main() {
    std::process::exit(avp::cli::run());
}
