fn main() {
    std::process::exit(treegroups::cli::run_from_args(std::env::args()));
}
