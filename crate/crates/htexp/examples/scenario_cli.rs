//! Drive the batch interface from code: write a scenario file, run the same
//! entry points the `htexp` binary dispatches to, and read the CSV back.

use std::io::Write;

fn main() {
    let dir = std::env::temp_dir().join("htexp_scenario_example");
    std::fs::create_dir_all(&dir).unwrap();
    let scenario = dir.join("bernoulli.toml");
    let mut f = std::fs::File::create(&scenario).unwrap();
    write!(
        f,
        r#"
p0 = [0.9, 0.1]
p1 = [0.2, 0.8]
gamma = 0.0

[sweep]
r_min = 1e-4
r_max = 1e-2
points = 10

[sim]
trials = 50000
seed = 7
gamma_grid = [4.0, 5.0, 6.0]
"#
    )
    .unwrap();

    for args in [
        vec!["exponents", "lrt"],
        vec!["worst-case", "sprt", "--sweep"],
        vec!["simulate", "sprt"],
    ] {
        let out = dir.join(format!("{}.csv", args.join("_").replace("--", "")));
        let mut argv = vec!["htexp".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.extend([
            "--scenario".to_string(),
            scenario.display().to_string(),
            "--out".to_string(),
            out.display().to_string(),
        ]);
        let code = htexp::cli::run_args(argv);
        assert_eq!(code, 0);
        println!("== {}\n{}", args.join(" "), std::fs::read_to_string(&out).unwrap());
    }
}
