fn main() {
    std::process::exit(spinor_tunnel_cli::run(std::env::args_os()));
}
