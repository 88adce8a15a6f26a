fn main() {
    // Delegates entirely to the library; see src/cli.rs.
    std::process::exit(cellmine::run_cli());
}
