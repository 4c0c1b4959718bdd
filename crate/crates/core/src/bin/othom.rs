fn main() {
    std::process::exit(othom_core::cli::main_entry());
}
