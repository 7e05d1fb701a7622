fn main() {
    let env = std::env::var(seqsing_cli::WORKERS_ENV).ok();
    let code = seqsing_cli::main_with(
        std::env::args_os(),
        env.as_deref(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
