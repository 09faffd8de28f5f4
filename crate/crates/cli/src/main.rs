fn main() {
    std::process::exit(atlas_sim::run(std::env::args_os()));
}
