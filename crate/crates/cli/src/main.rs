fn main() {
    if let Err(e) = bugs_tool::run(std::env::args_os()) {
        match e {
            bugs_tool::CliError::Usage(e) => e.exit(),
            e => {
                eprintln!("error: {e}");
                std::process::exit(e.exit_code());
            }
        }
    }
}
