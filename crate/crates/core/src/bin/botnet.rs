fn main() {
    let code = botnet_gru_cnn::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
