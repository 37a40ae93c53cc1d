use obstruction_forge::cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter(cli::LOG_ENV)).init();
    let code = cli::main_with_args(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
