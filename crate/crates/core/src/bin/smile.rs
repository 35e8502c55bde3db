fn main() {
    std::process::exit(smile::cli::main());
}
