fn main() {
    std::process::exit(beamsynth_cli::run(std::env::args_os()));
}
