use std::fs;
use std::io::Write;

use clap::{value_parser, Arg, ArgGroup, ArgMatches, Command};

use crate::generators::{
    gen_cycle, gen_matcomp, gen_random_matcomp, gen_stableset, parse_edge_list, parse_observations,
};
use crate::io::write_hslr;

use super::{CliError, EXIT_FAILURE, EXIT_OK};

fn command() -> Command {
    let output = Arg::new("output")
        .short('o')
        .long("output")
        .value_name("PATH")
        .help("Destination HSLR file (stdout when omitted)");
    let matcomp = Command::new("matcomp")
        .about("Nuclear-norm matrix completion instance")
        .arg(Arg::new("n1").long("n1").required(true).value_parser(value_parser!(usize)))
        .arg(Arg::new("n2").long("n2").required(true).value_parser(value_parser!(usize)))
        .arg(Arg::new("rank").long("rank").value_parser(value_parser!(usize)).help("Rank of the random ground truth"))
        .arg(Arg::new("fraction").long("fraction").value_parser(value_parser!(f64)).help("Fraction of observed entries"))
        .arg(Arg::new("seed").long("seed").default_value("0").value_parser(value_parser!(u64)))
        .arg(
            Arg::new("observations")
                .long("observations")
                .value_name("PATH")
                .help("File of `i j value` lines instead of random data"),
        )
        .group(ArgGroup::new("source").args(["rank", "observations"]).required(true))
        .arg(output.clone());
    let stableset = Command::new("stableset")
        .about("Lovász theta instance for a graph")
        .arg(Arg::new("edges").long("edges").value_name("PATH").help("Edge list, one `i j` pair per line"))
        .arg(Arg::new("cycle").long("cycle").value_parser(value_parser!(usize)).help("Use the n-cycle"))
        .arg(Arg::new("n").long("n").value_parser(value_parser!(usize)).help("Vertex count for --edges"))
        .group(ArgGroup::new("graph").args(["edges", "cycle"]).required(true))
        .arg(output);
    Command::new("gen")
        .bin_name("lrsdp gen")
        .about("Write generated instances in HSLR format")
        .subcommand_required(true)
        .subcommand(matcomp)
        .subcommand(stableset)
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_string(),
        source,
    })
}

fn build(sub: &str, m: &ArgMatches) -> Result<String, CliError> {
    let inst = match sub {
        "matcomp" => {
            let n1 = *m.get_one::<usize>("n1").expect("required");
            let n2 = *m.get_one::<usize>("n2").expect("required");
            let spec = if let Some(path) = m.get_one::<String>("observations") {
                parse_observations(&read(path)?, n1, n2)?
            } else {
                let rank = *m.get_one::<usize>("rank").expect("group is required");
                let fraction = *m
                    .get_one::<f64>("fraction")
                    .ok_or_else(|| CliError::Usage("--rank needs --fraction".into()))?;
                let seed = *m.get_one::<u64>("seed").expect("has default");
                gen_random_matcomp(n1, n2, rank, fraction, seed)?.0
            };
            gen_matcomp(&spec)?
        }
        _ => {
            let spec = if let Some(&n) = m.get_one::<usize>("cycle") {
                gen_cycle(n)?
            } else {
                let path = m.get_one::<String>("edges").expect("group is required");
                parse_edge_list(&read(path)?, m.get_one::<usize>("n").copied())?
            };
            gen_stableset(&spec)?
        }
    };
    Ok(write_hslr(&inst))
}

/// `gen matcomp ...` / `gen stableset ...`; `args` excludes the `gen` token.
pub fn gen_main(args: &[String], out: &mut dyn Write) -> i32 {
    let argv = std::iter::once("gen".to_string()).chain(args.iter().cloned());
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                eprintln!("{}", text.trim_end());
                EXIT_FAILURE
            };
        }
    };
    let (sub, m) = matches.subcommand().expect("subcommand is required");
    let result = build(sub, m).and_then(|text| match m.get_one::<String>("output") {
        Some(path) => fs::write(path, &text).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        }),
        None => {
            let _ = write!(out, "{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
