fn main() {
    std::process::exit(seqval::cli::main_with_args(std::env::args_os()));
}
