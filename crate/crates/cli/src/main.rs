use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Number, Value};
use subregular::{
    classify_graph, compress, count_avoiders_with_budget, solve, Error, Gf, GraphFamily, PatternSet, SolveConfig,
    SolveReport,
};
use subregular_symbolic::{Poly, PowerSeries, QuadExt, Rat, RationalFunction};

#[derive(Parser)]
#[command(name = "subregular", version, about = "Generating functions of pattern-avoiding permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count avoiders of each length by brute force.
    Enumerate(Opts),
    /// Print the compressed succession rules.
    Rules(Opts),
    /// Classify the label digraph.
    Classify(Opts),
    /// Solve for the generating function and verify it.
    Solve(Opts),
}

#[derive(Args)]
struct Opts {
    /// Pattern set, e.g. "123,43215" or "[3,1,2],[2,1,4,3]".
    #[arg(value_name = "PATTERNS", required_unless_present = "patterns", conflicts_with = "patterns")]
    positional: Option<String>,
    #[arg(long)]
    patterns: Option<String>,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    max_n: usize,
    /// First exploration depth (default 2t+4).
    #[arg(long, value_parser = positive)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 32, value_parser = positive)]
    series_order: usize,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    n_verify: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    allow_conjecture: bool,
    #[arg(long, default_value_t = 10_000_000, value_parser = positive_u64)]
    node_budget: u64,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("{s:?} is not a positive integer")),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|n| n as u64)
}

impl Opts {
    fn pattern_set(&self) -> Result<PatternSet, Error> {
        PatternSet::parse(self.positional.as_deref().or(self.patterns.as_deref()).unwrap_or_default())
    }

    fn config(&self) -> SolveConfig {
        SolveConfig {
            depth: self.depth,
            series_order: self.series_order,
            n_verify: Some(self.n_verify),
            node_budget: self.node_budget,
            allow_conjecture: self.allow_conjecture,
            ..SolveConfig::default()
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidPermutation(_)
        | Error::ForbiddenPatternOne
        | Error::InvalidPatternSet(_)
        | Error::ContainsPattern(_) => 2,
        Error::DepthExhausted { .. } => 3,
        Error::Unclassified(_) => 4,
        Error::VerificationMismatch(_) => 5,
        _ => 1,
    }
}

fn int(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

fn rational_json(r: &RationalFunction) -> Value {
    let (num, den) = r.to_integer_pair();
    json!({ "num": ints(&num), "den": ints(&den) })
}

/// Integer coefficient arrays for polynomials sharing one scale factor.
fn clear_common(polys: &[Poly]) -> Vec<Vec<BigInt>> {
    use num_integer::Integer;
    let lcm = polys.iter().flat_map(|p| p.coeffs()).fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<Vec<BigInt>> = polys
        .iter()
        .map(|p| p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect())
        .collect();
    let g = scaled.iter().flatten().fold(BigInt::from(0), |acc, c| acc.gcd(c));
    if g == BigInt::from(0) {
        return scaled;
    }
    scaled.into_iter().map(|p| p.into_iter().map(|c| c / &g).collect()).collect()
}

fn quad_json(q: &QuadExt) -> Value {
    let ctx = q.context().expect("irrational element has a context");
    let minpoly = clear_common(ctx.minpoly());
    json!({
        "type": "quadext",
        "a": rational_json(q.rational_part()),
        "b": rational_json(q.irrational_part()),
        "a_loops": ctx.a_loops(),
        "minpoly": minpoly.iter().map(|p| ints(p)).collect::<Vec<_>>(),
        "seed": ctx.seed().to_string(),
    })
}

fn gf_json(gf: &Gf) -> Value {
    match gf {
        Gf::Rational(r) => {
            let mut v = rational_json(r);
            v["type"] = json!("rational");
            v
        }
        Gf::QuadExt(q) => quad_json(q),
        Gf::Algebraic(rel) => {
            let ps = clear_common(&[rel.p0.clone(), rel.p1.clone(), rel.p2.clone()]);
            json!({ "type": "algebraic", "p0": ints(&ps[0]), "p1": ints(&ps[1]), "p2": ints(&ps[2]) })
        }
        Gf::SeriesOnly => json!({ "type": "series_only" }),
    }
}

fn series_ints(s: &PowerSeries) -> Vec<BigInt> {
    s.coeffs().iter().map(|c| c.to_integer()).collect()
}

#[derive(Serialize)]
struct ClassGf {
    class: String,
    gf: Value,
}

fn patterns_json(b: &PatternSet) -> Value {
    json!(b.patterns().iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

fn family_json(fam: &GraphFamily) -> Value {
    let mut v = json!({ "family": fam.name(), "summary": fam.to_string() });
    if let Some(w) = fam.w() {
        v["w"] = json!(w.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    }
    match fam {
        GraphFamily::BackwardPathDirected { a_loops, .. } => v["a_loops"] = json!(a_loops),
        GraphFamily::AlphaGrowing { alpha, .. } => v["alpha"] = json!(alpha),
        GraphFamily::Finite { matrix } => v["matrix"] = json!(matrix.entries),
        _ => {}
    }
    v
}

fn report_json(r: &SolveReport) -> Value {
    let class_gfs: Vec<ClassGf> =
        r.class_gfs.iter().map(|(class, gf)| ClassGf { class: class.clone(), gf: gf_json(gf) }).collect();
    json!({
        "patterns": patterns_json(&r.patterns),
        "classification": family_json(&r.classification),
        "gf": gf_json(&r.gf),
        "series": ints(&series_ints(&r.series)),
        "verified_against_oracle_to": r.verified_against_oracle_to,
        "certificate": r.certificate,
        "conjectural": r.conjectural,
        "class_gfs": class_gfs,
    })
}

fn report_text(r: &SolveReport) -> String {
    let series: Vec<String> = series_ints(&r.series).iter().map(|c| c.to_string()).collect();
    let mut out = vec![
        format!("patterns: {}", r.patterns),
        format!("classification: {}", r.classification),
        format!("G(x) = {}", r.gf.describe()),
        format!("series: {}", series.join(", ")),
        format!("verified against brute force for n <= {}", r.verified_against_oracle_to),
        format!("rules certified up to length {}", r.certificate),
    ];
    if r.conjectural {
        out.push("conjectural: fitted from the series, not derived".into());
    }
    for (class, gf) in &r.class_gfs {
        out.push(format!("F_{class} = {}", gf.describe()));
    }
    out.join("\n")
}

fn run(command: &Command) -> Result<String, Error> {
    let (Command::Enumerate(opts) | Command::Rules(opts) | Command::Classify(opts) | Command::Solve(opts)) = command;
    let b = opts.pattern_set()?;
    let config = opts.config();
    let out = match command {
        Command::Enumerate(_) => {
            let counts = count_avoiders_with_budget(&b, opts.max_n, opts.node_budget)?;
            if opts.json {
                json!({ "patterns": patterns_json(&b), "counts": counts }).to_string()
            } else {
                let rows: Vec<String> = counts.iter().enumerate().map(|(i, c)| format!("{} {c}", i + 1)).collect();
                rows.join("\n")
            }
        }
        Command::Rules(_) => {
            let cr = compress(&b, &config)?;
            let text = cr.to_string();
            if opts.json {
                let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                json!({ "patterns": patterns_json(&b), "m": cr.m, "rules": lines }).to_string()
            } else {
                text.trim_end().to_string()
            }
        }
        Command::Classify(_) => {
            let fam = classify_graph(&compress(&b, &config)?);
            if opts.json {
                let mut v = family_json(&fam);
                v["patterns"] = patterns_json(&b);
                v.to_string()
            } else {
                fam.to_string()
            }
        }
        Command::Solve(_) => {
            let report = solve(&b, &config)?;
            if opts.json {
                report_json(&report).to_string()
            } else {
                report_text(&report)
            }
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&Error::ForbiddenPatternOne), 2);
        assert_eq!(exit_code(&Error::InvalidPermutation("x".into())), 2);
        assert_eq!(exit_code(&Error::DepthExhausted { max_depth: 9 }), 3);
        assert_eq!(exit_code(&Error::Unclassified("x".into())), 4);
        assert_eq!(exit_code(&Error::VerificationMismatch("x".into())), 5);
        assert_eq!(exit_code(&Error::NodeBudgetExceeded { budget: 1 }), 1);
    }
}
