use std::io;

fn main() {
    let registry = vmc_engines::default_registry();
    let code = vmc_cli::run_cli(
        std::env::args_os(),
        &registry,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
