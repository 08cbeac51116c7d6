fn main() {
    std::process::exit(sepbayes::cli::main_entry());
}
