fn main() {
    std::process::exit(sdnlw::harness::cli_main(std::env::args_os()));
}
