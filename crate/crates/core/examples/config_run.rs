//! Parses a config in memory and runs the analysis without the binary.

use relcurv::cli::{execute, parse_config, write_csv, Command};

const CONFIG: &str = r#"
[metric]
family = "rotational"
dim = 3

[rotational]
ode = { B = 1.0, r0 = 0.5, v0 = 0.2, t_span = [-0.2, 0.2] }

[analysis]
seed = 7
grid = [
  { min = 0.0, max = 0.0, count = 1 },
  { min = 0.0, max = 0.0, count = 1 },
  { min = -0.1, max = 0.1, count = 3 },
]
"#;

fn main() -> relcurv::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let out = execute(&cfg, Command::Analyze)?;
    write_csv(&out.table.expect("analyze yields a table"), 8, std::io::stdout())
}
