//! Run every shipped preset through the scenario front end and print the
//! summaries the CLI would show.

use qequiv::scenario::{execute, load_config, Command, ReduceChannel, Scenario, PRESET_NAMES};

fn main() {
    for name in PRESET_NAMES {
        let scenario =
            Scenario::build(load_config(name).expect("preset parses")).expect("preset is valid");
        let commands: &[Command] = if scenario.dynamics.is_some() {
            &[Command::Sieve, Command::Run(ReduceChannel::Modified)]
        } else {
            &[Command::Reduce(ReduceChannel::Modified), Command::Compare]
        };
        for &command in commands {
            match execute(&scenario, command, 2) {
                Ok(out) => print!("{}", out.summary),
                Err(e) => eprintln!("{name}: {e}"),
            }
        }
        println!();
    }
}
