fn main() -> std::process::ExitCode {
    circle_ergodic::cli::main()
}
