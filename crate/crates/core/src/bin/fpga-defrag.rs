fn main() {
    std::process::exit(fpga_defrag::cli::run(std::env::args_os()));
}
