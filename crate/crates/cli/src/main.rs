fn main() {
    std::process::exit(specnorm::app::main_with_args(std::env::args_os()));
}
