use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fusionlim::fusion::{FusionSystem, SubId};
use fusionlim::group::{parse_generator_list, Group};
use fusionlim::lattice::DEFAULT_PGROUP_CAP;
use fusionlim::library::data_file;
use fusionlim::offenders::{
    best_offenders, is_solitary, solitary_decomposition, solitary_offenders, thompson_subgroup, OffenderReport,
};
use fusionlim::orbitlim::{higher_limits, DEFAULT_COCHAIN_CAP};
use fusionlim::parse::{Descriptor, DEFAULT_ORDER_CAP};
use fusionlim::verify::{offender_interval, run_suite, setup_fusion, Caps, SUITE_NAMES};
use fusionlim::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "fusionlim", version, about = "Fusion systems, higher limits and offenders of permutation groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant factors of L^k of the center functor over a collection
    Limits(Options),
    /// Best offenders, Thompson subgroup and solitary offenders of a module
    Offenders(Options),
    /// Run a named check suite
    Verify(Options),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Options {
    /// Descriptor file, or a shipped name: a6, s4, s5-natural, sl32-natural, s3xs5
    #[arg(long)]
    group: Option<PathBuf>,
    /// Overrides the descriptor's prime line
    #[arg(long)]
    prime: Option<u64>,
    /// centric | overgroups-of Y=<label> | explicit <gens>... | offender-interval
    #[arg(long, num_args = 1..)]
    collection: Vec<String>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for element scans
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "cap-order", default_value_t = DEFAULT_ORDER_CAP)]
    cap_order: usize,
    #[arg(long = "cap-cochains", default_value_t = DEFAULT_COCHAIN_CAP)]
    cap_cochains: usize,
    /// Suite name for verify
    #[arg(long)]
    suite: Option<String>,
}

/// A finished command in both renderings.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

fn gens_of(g: &Group) -> String {
    let v: Vec<String> = g.gens().iter().map(|x| x.to_string()).collect();
    format!("<{}>", v.join(", "))
}

fn load(opts: &Options) -> Result<Descriptor> {
    let path = opts.group.as_ref().ok_or_else(|| Error::precondition("--group is required"))?;
    if path.exists() {
        return Descriptor::read(path);
    }
    let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("");
    match data_file(stem) {
        Some(text) => Descriptor::parse(text),
        None => Err(Error::precondition(format!("no such file: {}", path.display()))),
    }
}

fn with_prime(opts: &Options, mut d: Descriptor) -> Result<Descriptor> {
    let p = opts.prime.or(d.prime).ok_or_else(|| Error::precondition("no prime given"))?;
    if p < 2 || (2..p).take_while(|q| q * q <= p).any(|q| p % q == 0) {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    d.prime = Some(p);
    Ok(d)
}

fn caps(opts: &Options) -> Caps {
    Caps { cochains: opts.cap_cochains, pgroup: DEFAULT_PGROUP_CAP }
}

fn collection(opts: &Options, d: &Descriptor) -> Result<(FusionSystem, BTreeSet<SubId>, String)> {
    let p = d.prime.expect("prime resolved");
    let words = &opts.collection;
    let kind = words.first().map(String::as_str).unwrap_or("centric");
    let setup = |y: Option<&str>| {
        let mut dd = d.clone();
        if let Some(y) = y {
            dd.y = Some(y.to_string());
        }
        dd.setup(opts.cap_order)
    };
    match kind {
        "centric" => {
            let fs = FusionSystem::new(&d.group(opts.cap_order)?, p, DEFAULT_PGROUP_CAP)?;
            let c = fs.centrics().into_iter().collect();
            Ok((fs, c, "centric".into()))
        }
        "overgroups-of" => {
            let arg = words.get(1).ok_or_else(|| Error::precondition("overgroups-of needs Y=<label>"))?;
            let label = arg.strip_prefix("Y=").ok_or_else(|| Error::precondition("expected Y=<label>"))?;
            let st = setup(Some(label))?;
            let fs = setup_fusion(&st, caps(opts))?;
            let y = fs.id_of(&st.y).ok_or_else(|| Error::precondition("Y is not inside S"))?;
            let u = fs.overgroups(y).into_iter().collect();
            Ok((fs, u, format!("overgroups-of Y={label}")))
        }
        "offender-interval" => {
            let st = setup(words.get(1).and_then(|w| w.strip_prefix("Y=")))?;
            let fs = setup_fusion(&st, caps(opts))?;
            let r = offender_interval(&st, &fs)?;
            Ok((fs, r, "offender-interval".into()))
        }
        "explicit" => {
            let fs = FusionSystem::new(&d.group(opts.cap_order)?, p, DEFAULT_PGROUP_CAP)?;
            let mut members = BTreeSet::new();
            for w in &words[1..] {
                let h = fs.gamma().subgroup(parse_generator_list(d.degree, w)?)?;
                let id = fs
                    .id_of(&h)
                    .ok_or_else(|| Error::NotSubgroup(format!("{} is not inside S = {}", gens_of(&h), gens_of(fs.sylow()))))?;
                members.insert(id);
            }
            let iv = fs.validate_interval(&members);
            if !members.is_empty() && (!iv.is_interval || !iv.f_invariant) {
                return Err(Error::precondition("explicit collection is not an F-invariant interval"));
            }
            Ok((fs, members, "explicit".into()))
        }
        other => Err(Error::precondition(format!(
            "unknown collection {other:?}; use centric, overgroups-of Y=<label>, explicit or offender-interval"
        ))),
    }
}

fn limits(opts: &Options) -> Result<Report> {
    let d = with_prime(opts, load(opts)?)?;
    let (fs, members, name) = collection(opts, &d)?;
    let (factors, dims) = if members.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let lim = higher_limits(&fs, &members, opts.k, opts.cap_cochains)?;
        let r = &lim[opts.k];
        (r.invariant_factors.clone(), r.cochain_dims.clone())
    };
    let text = format!(
        "{factors:?}\n# L^{} over {name}: {} subgroups, order {}\n",
        opts.k,
        members.len(),
        factors.iter().product::<u128>()
    );
    let json = json!({ "k": opts.k, "collection_size": members.len(), "invariant_factors": factors, "cochain_dims": dims });
    Ok(Report { text, json, code: 0 })
}

fn offender_line(r: &OffenderReport) -> String {
    let f = &r.flags;
    let mut tags = Vec::new();
    for (on, tag) in [
        (f.over, "over"),
        (f.minimal, "minimal"),
        (f.quadratic, "quadratic"),
        (f.solitary, "solitary"),
        (f.semisolitary, "semisolitary"),
    ] {
        if on {
            tags.push(tag);
        }
    }
    format!("  {} order {} |C_D(A)| {} [{}]", gens_of(&r.subgroup), r.size, r.fixed_size, tags.join(" "))
}

fn offenders(opts: &Options) -> Result<Report> {
    let mut d = load(opts)?;
    if let Some(p) = opts.prime {
        if d.prime != Some(p) {
            return Err(Error::precondition("--prime differs from the module's prime"));
        }
    }
    if !d.has_module() {
        return Err(Error::precondition("descriptor has no module (orders and mat lines)"));
    }
    d = with_prime(opts, d)?;
    let act = d.action(opts.cap_order)?;
    let reports = best_offenders(&act)?;
    let g = act.group();
    let p = act.module().prime();
    let s = g.sylow(p);
    let all: Vec<Group> = reports.iter().map(|r| r.subgroup.clone()).collect();
    let j = thompson_subgroup(&all, &s, &act)?;
    let solitary = solitary_offenders(&act)?;
    let mut witnesses = Vec::new();
    for t in solitary.iter().filter(|t| t.is_subgroup_of(&s)) {
        if let Some(w) = is_solitary(&act, t, &s)? {
            witnesses.push(w);
        }
    }
    let decomposition = if p == 2 {
        match solitary_decomposition(&act) {
            Ok(dec) => Some(dec),
            Err(Error::Hypothesis(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut text = format!("|G| = {}, |D| = {}, |S| = {}\n", g.order(), act.module().order(), s.order());
    text.push_str(&format!("best offenders {}\n", reports.len()));
    for r in &reports {
        text.push_str(&offender_line(r));
        text.push('\n');
    }
    text.push_str(&format!("thompson J_A(S) = {} order {}\n", gens_of(&j), j.order()));
    text.push_str(&format!("solitary {}\n", solitary.len()));
    for t in &solitary {
        text.push_str(&format!("  {}\n", gens_of(t)));
    }
    for w in &witnesses {
        text.push_str(&format!("witness T = {} L = {} J = {}\n", gens_of(&w.t), gens_of(&w.l), gens_of(&w.j)));
    }
    let dec_json = decomposition.as_ref().map(|dec| {
        let m = act.module();
        json!({
            "degrees": dec.degrees(),
            "factors": dec.factors.iter().map(|f| json!({ "m": f.m, "e": gens_of(&f.e), "rank": f.v.log_order(m) })).collect::<Vec<_>>(),
            "residue_rank": dec.residue.log_order(m),
        })
    });
    if let Some(dec) = &decomposition {
        text.push_str(&format!("decomposition degrees {:?}\n", dec.degrees()));
    }
    let json = json!({
        "group_order": g.order(),
        "module_order": act.module().order().to_string(),
        "best_offenders": reports,
        "thompson": j.gens().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "solitary": solitary.iter().map(|t| t.gens().iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "witnesses": witnesses,
        "decomposition": dec_json,
    });
    Ok(Report { text, json, code: 0 })
}

fn verify(opts: &Options) -> Result<Report> {
    let suite = opts.suite.as_deref().ok_or_else(|| Error::precondition(format!("--suite is required; known: {}", SUITE_NAMES.join(", "))))?;
    let input = match &opts.group {
        Some(_) => Some(with_prime(opts, load(opts)?)?),
        None => None,
    };
    let r = run_suite(suite, input.as_ref(), opts.cap_order, caps(opts))?;
    let passed = r.passed();
    let mut text = String::new();
    for c in &r.checks {
        text.push_str(&format!("{} {}", if c.pass { "pass" } else { "FAIL" }, c.name));
        if !c.detail.is_empty() {
            text.push_str(&format!(" :: {}", c.detail));
        }
        text.push('\n');
    }
    text.push_str(&format!("suite {suite}: {}\n", if passed { "pass" } else { "FAIL" }));
    let json = json!({ "suite": suite, "passed": passed, "checks": r.checks });
    Ok(Report { text, json, code: if passed { 0 } else { 3 } })
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, opts) = match &cli.command {
        Command::Limits(o) => ("limits", o),
        Command::Offenders(o) => ("offenders", o),
        Command::Verify(o) => ("verify", o),
    };
    if let Some(n) = opts.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid thread count {n}");
            return ExitCode::from(1);
        }
    }
    let result = match name {
        "limits" => limits(opts),
        "offenders" => offenders(opts),
        _ => verify(opts),
    };
    match result {
        Ok(report) => {
            match opts.format {
                Format::Text => emit(&report.text),
                Format::Json => {
                    let mut body = json!({ "schema": 1, "command": name, "config": opts });
                    if let (Value::Object(out), Value::Object(extra)) = (&mut body, report.json) {
                        out.extend(extra);
                    }
                    emit(&format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable report")));
                }
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            match opts.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({ "schema": 1, "command": name, "config": opts, "error": e.to_string(), "exit_code": e.exit_code() }))
                        .expect("serializable error")
                )),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
