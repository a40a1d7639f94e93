fn main() {
    std::process::exit(secretsniff::cli::main_entry());
}
