//! Command-line front end: wires configs to the library, echoes the
//! resolved config for exact replay, and writes tabular reports.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or config error.

mod commands;
mod config;

use config::*;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "usage: conewarp <command> [--config <path>] [--seed <u64>] [--out <dir>] [--grid <axis=value>]...

commands:
  lemma-verify       directional Ricci positivity over configured grids
  lemma-search       parameter sweep for a feasible (E, F, r0, D) tuple
  example1           suspension family checks: volume law, boundary limits
  example2           bubble/football family: glue margins and uniform bounds
  cobordism          five-dimensional cone/cap pieces and their glue
  gh                 tangent-cone experiment (or identical-space smoke test)
  oracle-crosscheck  analytic Ricci against the finite-difference oracle
";

struct Cli {
    command: String,
    config: Option<String>,
    seed: Option<u64>,
    out: PathBuf,
    grid: Vec<(String, String)>,
}

fn parse_args(args: &[String]) -> Result<Cli, String> {
    if args.is_empty() {
        return Err("missing command".into());
    }
    let mut cli = Cli {
        command: args[0].clone(),
        config: None,
        seed: None,
        out: PathBuf::from("out"),
        grid: Vec::new(),
    };
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next().cloned().ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(value()?),
            "--seed" => {
                cli.seed =
                    Some(value()?.parse::<u64>().map_err(|e| format!("bad seed: {e}"))?)
            }
            "--out" => cli.out = PathBuf::from(value()?),
            "--grid" => {
                let v = value()?;
                let (k, val) = v
                    .split_once('=')
                    .ok_or_else(|| format!("--grid expects axis=value, got '{v}'"))?;
                cli.grid.push((k.to_string(), val.to_string()));
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(cli)
}

fn write_echo<T: serde::Serialize>(cfg: &T, out: &PathBuf) -> Result<(), String> {
    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    std::fs::write(out.join("config_echo.json"), echo_config(cfg)).map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<commands::Outcome, String> {
    match cli.command.as_str() {
        "lemma-verify" => {
            let mut cfg: LemmaVerifyConfig =
                load_config(cli.config.as_deref(), r#"{"family": "stationary-round"}"#)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            for (k, v) in &cli.grid {
                cfg.grid.apply_override(k, v)?;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_lemma_verify(&cfg, &cli.out)
        }
        "lemma-search" => {
            let mut cfg: LemmaSearchConfig =
                load_config(cli.config.as_deref(), r#"{"family": "stationary-round"}"#)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            for (k, v) in &cli.grid {
                cfg.grid.apply_override(k, v)?;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_lemma_search(&cfg, &cli.out)
        }
        "example1" => {
            let mut cfg: Example1Config = load_config(cli.config.as_deref(), "{}")?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_example1(&cfg, &cli.out)
        }
        "example2" => {
            let mut cfg: Example2Config = load_config(cli.config.as_deref(), "{}")?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_example2(&cfg, &cli.out)
        }
        "cobordism" => {
            let mut cfg: CobordismConfig = load_config(cli.config.as_deref(), "{}")?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_cobordism(&cfg, &cli.out)
        }
        "gh" => {
            let mut cfg: GhCommandConfig = load_config(cli.config.as_deref(), "{}")?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_gh(&cfg, &cli.out)
        }
        "oracle-crosscheck" => {
            let mut cfg: OracleCrosscheckConfig =
                load_config(cli.config.as_deref(), r#"{"ansatz": "berger"}"#)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            write_echo(&cfg, &cli.out)?;
            commands::cmd_oracle_crosscheck(&cfg, &cli.out)
        }
        other => Err(format!("unknown command '{other}'\n{USAGE}")),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}: {}", cli.command, outcome.summary);
            ExitCode::from(outcome.exit as u8)
        }
        Err(msg) => {
            eprintln!("{}: {msg}", cli.command);
            ExitCode::from(2)
        }
    }
}
