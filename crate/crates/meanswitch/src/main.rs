fn main() {
    std::process::exit(meanswitch::cli::main_with_env());
}
