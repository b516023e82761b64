fn main() {
    std::process::exit(fracvel_cli::main_with(std::env::args_os()));
}
