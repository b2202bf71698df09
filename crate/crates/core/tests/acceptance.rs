//! Acceptance criteria 1-10, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fusionlim::fusion::{FusionSystem, SubId};
use fusionlim::library::{data_file, module_instance, setup_instance, MODULE_NAMES};
use fusionlim::orbitlim::higher_limits;
use fusionlim::parse::{Descriptor, DEFAULT_ORDER_CAP};
use fusionlim::verify::{self, Caps, SuiteReport, TWO_LOCAL_NAMES};
use fusionlim::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: Vec<SuiteReport>) -> Outcome {
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failures: Vec<String> = reports.iter().flat_map(|r| r.failures()).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Outcome {
        pass: total > 0 && failures.is_empty(),
        detail: if failures.is_empty() { format!("{total} checks") } else { failures.join("; ") },
    }
}

fn a6_fusion() -> Result<FusionSystem> {
    let d = Descriptor::parse(data_file("a6").expect("shipped"))?;
    FusionSystem::new(&d.group(DEFAULT_ORDER_CAP)?, 2, Caps::default().pgroup)
}

fn criterion_1() -> Result<Outcome> {
    let fs = a6_fusion()?;
    let c: BTreeSet<SubId> = fs.centrics().into_iter().collect();
    let lim = higher_limits(&fs, &c, 2, Caps::default().cochains)?;
    let (l1, l2) = (&lim[1].invariant_factors, &lim[2].invariant_factors);
    Ok(Outcome { pass: *l1 == [2] && l2.is_empty(), detail: format!("L^1 {l1:?}, L^2 {l2:?}") })
}

fn criterion_2() -> Result<Outcome> {
    let st = Descriptor::parse(data_file("s4").expect("shipped"))?.setup(DEFAULT_ORDER_CAP)?;
    let mut out = from_reports(vec![verify::olijm("s4", &st, Caps::default())?]);
    out.pass &= st.reduced;
    Ok(out)
}

fn criterion_3() -> Result<Outcome> {
    let mut reports = Vec::new();
    for name in ["s4", "a6-v4a", "a6-v4b"] {
        reports.push(verify::les_setup(name, &setup_instance(name)?, Caps::default())?);
    }
    Ok(from_reports(reports))
}

fn modules(names: &[&str]) -> Result<Vec<(String, fusionlim::modaction::Action)>> {
    names.iter().map(|n| Ok((n.to_string(), module_instance(n)?))).collect()
}

fn criterion_4() -> Result<Outcome> {
    let r = verify::normarg(&modules(&MODULE_NAMES)?, 10)?;
    let count = r.checks.last().map(|c| c.detail.clone()).unwrap_or_default();
    let mut out = from_reports(vec![r]);
    if out.pass {
        out.detail = count;
    }
    Ok(out)
}

fn criterion_5() -> Result<Outcome> {
    let mut reports = Vec::new();
    for (name, act) in modules(&MODULE_NAMES)? {
        reports.push(verify::replacement_suite(&name, &act, Caps::default())?);
    }
    Ok(from_reports(reports))
}

fn criterion_6() -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut applicable = 0;
    for (name, act) in modules(&TWO_LOCAL_NAMES)? {
        let r = verify::nooveroffenders(&name, &act, Caps::default())?;
        if r.checks.iter().any(|c| c.name.contains("(d)")) {
            applicable += 1;
        }
        reports.push(r);
    }
    let mut out = from_reports(reports);
    out.pass &= applicable > 0;
    out.detail = format!("{applicable} instances without over-offenders; {}", out.detail);
    Ok(out)
}

fn criterion_7() -> Result<Outcome> {
    Ok(from_reports(vec![verify::solitary_library()?]))
}

fn criterion_8() -> Result<Outcome> {
    let s4 = Descriptor::parse(data_file("s4").expect("shipped"))?;
    let st = s4.setup(DEFAULT_ORDER_CAP)?;
    let fs_s4 = verify::setup_fusion(&st, Caps::default())?;
    let fs_a6 = a6_fusion()?;
    Ok(from_reports(vec![verify::wellplaced("s4", &fs_s4, Some(&st))?, verify::wellplaced("a6", &fs_a6, None)?]))
}

fn criterion_9() -> Result<Outcome> {
    Ok(from_reports(vec![verify::rigid("a6", &a6_fusion()?, Caps::default())?]))
}

fn criterion_10() -> Result<Outcome> {
    Ok(from_reports(vec![verify::oddvanish("asl23", &setup_instance("asl23")?, Caps::default())?]))
}

fn main() -> ExitCode {
    type Run = fn() -> Result<Outcome>;
    let criteria: [(&str, Run, u64); 10] = [
        ("A6 regression", criterion_1, 60),
        ("S4 overgroups of Y", criterion_2, 10),
        ("exact sequences", criterion_3, 120),
        ("norm arguments", criterion_4, 600),
        ("replacement", criterion_5, 600),
        ("no over-offenders", criterion_6, 600),
        ("solitary offenders", criterion_7, 300),
        ("conjugation families", criterion_8, 600),
        ("rigid maps", criterion_9, 600),
        ("odd-prime vanishing", criterion_10, 600),
    ];
    let mut all = true;
    for (i, (title, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= Duration::from_secs(*budget);
        let ok = pass && in_time;
        all &= ok;
        let timing = if in_time { format!("{elapsed:.2?}") } else { format!("{elapsed:.2?} over the {budget} s budget") };
        println!("{} {}: {title} ({timing}) {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
