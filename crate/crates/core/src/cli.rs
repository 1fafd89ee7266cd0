// Copyright 2026 The psmanip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and writes the report
//! to `out`. Diagnostics go to `err`. The returned exit code is 0 on success,
//! 1 when a verification fails and 2 on invalid input or an exceeded budget.

use std::ffi::OsString;
use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ballots::{
    anonymous_profile_count, enumerate_orders, expand, AnonymousProfile, Profile,
    DEFAULT_MAX_CANDIDATES,
};
use crate::compare::{compare_exhaustive, ComparisonReport, ScanOptions, DEFAULT_BUDGET};
use crate::manipulation::{
    brute_force_manipulable_by_with, brute_force_manipulation_with, find_manipulation,
    manipulable_by, ManipulationWitness,
};
use crate::scoring::{scoring_vector, tally, Family, RuleArg, RuleSpec, ScoreTable};
use crate::witnesses::{verify_claim, ClaimId, ClaimSummary, Grid, Status, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "psmanip",
    version,
    about = "Manipulability of k-approval and k-Borda rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tally a profile and print the winner with every score.
    Winner(WinnerArgs),
    /// Look for a voter who gains by misreporting.
    Manipulable(ManipulableArgs),
    /// Compare two rules by scanning every profile at (n, m).
    Compare(CompareArgs),
    /// Build and check the counterexample profiles behind a claim.
    Verify(VerifyArgs),
    /// Compare every pair of rules in a family over a grid, as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    #[value(alias = "table")]
    Text,
}

/// Inclusive range written `a..b`, `a..=b` or just `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    lo: usize,
    hi: usize,
}

impl Span {
    fn range(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("expected a number or a range like 2..4, got {s:?}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Span { lo, hi })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl Serialize for Span {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Args, Serialize)]
struct WinnerArgs {
    /// approval:<k>, borda:<k> or borda:m-1
    #[arg(long)]
    rule: String,
    /// Profile JSON file, ordered or anonymous form; `-` reads stdin.
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args, Serialize)]
struct ManipulableArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    profile: PathBuf,
    /// Only consider this voter.
    #[arg(long)]
    voter: Option<usize>,
    /// Search all m! misreports instead of the normal-form vote.
    #[arg(long)]
    brute_force: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args, Serialize)]
struct CompareArgs {
    #[arg(long = "f")]
    f: String,
    #[arg(long = "g")]
    g: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    /// Refuse scans larger than this many profiles.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Stop once both witnesses are found; counts are omitted.
    #[arg(long)]
    fast: bool,
    /// Scan ordered tuples instead of multisets.
    #[arg(long)]
    no_anonymize: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    claim: ClaimId,
    #[arg(long)]
    n: Span,
    #[arg(long)]
    m: Span,
    #[arg(long)]
    i: Option<Span>,
    #[arg(long)]
    j: Option<Span>,
    /// Alias for --i, for claims stated with a single index k.
    #[arg(long, conflicts_with = "i")]
    k: Option<Span>,
    /// Base seed for the "any order" reorderings.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    reorderings: usize,
    /// Largest m at which the brute-force oracle re-checks robustness.
    #[arg(long, default_value_t = 5)]
    oracle_max_m: usize,
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Approval,
    Borda,
    Both,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    #[arg(long)]
    n: Span,
    #[arg(long)]
    m: Span,
    /// Restrict the smaller rule index.
    #[arg(long)]
    i: Option<Span>,
    /// Restrict the larger rule index.
    #[arg(long)]
    j: Option<Span>,
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    fast: bool,
}

/// Input error tagged with the flag it came from.
#[derive(Debug)]
struct Invalid {
    field: &'static str,
    message: String,
}

fn invalid(field: &'static str, e: impl fmt::Display) -> Invalid {
    Invalid {
        field,
        message: e.to_string(),
    }
}

type CmdResult = Result<u8, Invalid>;

#[derive(Serialize)]
struct Meta<'a, A: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    flags: &'a A,
}

fn meta<'a, A: Serialize>(command: &'static str, flags: &'a A) -> Meta<'a, A> {
    Meta {
        tool: "psmanip",
        version: env!("CARGO_PKG_VERSION"),
        command,
        flags,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Winner(a) => cmd_winner(a, out),
        Command::Manipulable(a) => cmd_manipulable(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Invalid { field, message }) => {
            let _ = writeln!(err, "error: {field}: {message}");
            EXIT_INVALID
        }
    }
}

fn load_profile(path: &PathBuf) -> Result<Profile, Invalid> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| invalid("--profile", e))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| invalid("--profile", format!("{}: {e}", path.display())))?;
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| invalid("--profile", e))?;
    if value.get("counts").is_some() {
        let a: AnonymousProfile =
            serde_json::from_value(value).map_err(|e| invalid("--profile", e))?;
        Ok(expand(&a))
    } else {
        serde_json::from_value(value).map_err(|e| invalid("--profile", e))
    }
}

fn parse_rule(field: &'static str, s: &str, m: usize) -> Result<RuleSpec, Invalid> {
    let arg: RuleArg = s.parse().map_err(|e| invalid(field, e))?;
    arg.resolve(m).map_err(|e| invalid(field, e))
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> CmdResult {
    let text = serde_json::to_string(value).map_err(|e| invalid("output", e))?;
    writeln!(out, "{text}").map_err(|e| invalid("output", e))?;
    Ok(EXIT_OK)
}

fn emit_text(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| invalid("output", e))?;
    Ok(EXIT_OK)
}

fn cmd_winner(a: &WinnerArgs, out: &mut dyn Write) -> CmdResult {
    let p = load_profile(&a.profile)?;
    let rule = parse_rule("--rule", &a.rule, p.m())?;
    let v = scoring_vector(&rule, p.m()).map_err(|e| invalid("--rule", e))?;
    let scores = tally(&p, &v);
    let w = scores.winner();
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                winner: u8,
                scores: &'a ScoreTable,
            }
            emit_json(
                out,
                &Doc {
                    winner: w.0,
                    scores: &scores,
                },
            )
        }
        Format::Text => {
            let mut s = format!("rule: {rule}\nwinner: {}\n", w.0);
            for (c, v) in scores.as_slice().iter().enumerate() {
                s.push_str(&format!("  {c}: {v}\n"));
            }
            emit_text(out, &s)
        }
    }
}

fn cmd_manipulable(a: &ManipulableArgs, out: &mut dyn Write) -> CmdResult {
    let p = load_profile(&a.profile)?;
    let rule = parse_rule("--rule", &a.rule, p.m())?;
    if let Some(v) = a.voter {
        if v >= p.n() {
            return Err(invalid(
                "--voter",
                format!("voter {v} out of range, profile has n={}", p.n()),
            ));
        }
    }
    let witness: Option<ManipulationWitness> = if a.brute_force {
        let orders = enumerate_orders(p.m()).map_err(|e| invalid("--brute-force", e))?;
        let v = scoring_vector(&rule, p.m()).map_err(|e| invalid("--rule", e))?;
        match a.voter {
            Some(voter) => brute_force_manipulable_by_with(voter, &p, &v, &orders),
            None => brute_force_manipulation_with(&p, &v, &orders),
        }
    } else {
        match a.voter {
            Some(voter) => manipulable_by(voter, &p, &rule),
            None => find_manipulation(&p, &rule),
        }
        .map_err(|e| invalid("--rule", e))?
    };
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                manipulable: bool,
                witness: &'a Option<ManipulationWitness>,
            }
            emit_json(
                out,
                &Doc {
                    manipulable: witness.is_some(),
                    witness: &witness,
                },
            )
        }
        Format::Text => {
            let s = match &witness {
                None => format!("{rule}: not manipulable\n"),
                Some(w) => format!(
                    "{rule}: voter {} reports {} and moves the winner from {} to {}\n",
                    w.voter, w.misreport, w.sincere_winner.0, w.new_winner.0
                ),
            };
            emit_text(out, &s)
        }
    }
}

fn scan_options(threads: Option<usize>, budget: u128, fast: bool, anonymize: bool) -> ScanOptions {
    ScanOptions {
        budget,
        threads,
        anonymize,
        fast,
        ..ScanOptions::default()
    }
}

fn scan_error(e: crate::Error) -> Invalid {
    match e {
        crate::Error::BudgetExceeded { .. } => invalid("--budget", e),
        crate::Error::CandidateCount { .. } => invalid("--m", e),
        crate::Error::CountOverflow { .. } => invalid("--n", e),
        other => invalid("--f/--g", other),
    }
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    if a.n == 0 {
        return Err(invalid("--n", "need at least one voter"));
    }
    if a.m < 2 {
        return Err(invalid("--m", "need at least two candidates"));
    }
    let f = parse_rule("--f", &a.f, a.m)?;
    let g = parse_rule("--g", &a.g, a.m)?;
    let opts = scan_options(a.threads, a.budget, a.fast, !a.no_anonymize);
    let report = compare_exhaustive(&f, &g, a.n, a.m, &opts).map_err(scan_error)?;
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                report: &'a ComparisonReport,
                meta: Meta<'a, CompareArgs>,
            }
            emit_json(
                out,
                &Doc {
                    report: &report,
                    meta: meta("compare", a),
                },
            )
        }
        Format::Text => emit_text(out, &compare_text(&report)),
    }
}

fn compare_text(r: &ComparisonReport) -> String {
    let mut s = format!(
        "f = {}, g = {}, n = {}, m = {}: {}\n",
        r.rule_f, r.rule_g, r.n, r.m, r.relation
    );
    if let Some(c) = &r.counts {
        s.push_str(&format!(
            "profiles {}, f manipulable {}, g manipulable {}, both {}\n",
            c.profiles_scanned, c.manip_f, c.manip_g, c.manip_both
        ));
    }
    let show = |w: &Option<AnonymousProfile>| match w {
        None => "none".to_string(),
        Some(a) => a
            .counts()
            .map(|(b, k)| format!("{k}x{b}"))
            .collect::<Vec<_>>()
            .join(" "),
    };
    s.push_str(&format!(
        "g manipulable, f not: {}\n",
        show(&r.witness_g_not_f)
    ));
    s.push_str(&format!(
        "f manipulable, g not: {}\n",
        show(&r.witness_f_not_g)
    ));
    s
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if a.n.lo == 0 {
        return Err(invalid("--n", "need at least one voter"));
    }
    if a.m.hi > DEFAULT_MAX_CANDIDATES {
        return Err(invalid(
            "--m",
            format!("at most {DEFAULT_MAX_CANDIDATES} candidates supported"),
        ));
    }
    let grid = Grid {
        n: a.n.range(),
        m: a.m.range(),
        i: a.i.or(a.k).map(Span::range),
        j: a.j.map(Span::range),
    };
    let opts = VerifyOptions {
        seed: a.seed,
        reorderings: a.reorderings,
        oracle_max_m: a.oracle_max_m,
        threads: a.threads,
        scan: ScanOptions {
            budget: a.budget,
            ..ScanOptions::sequential()
        },
    };
    let summary = verify_claim(a.claim, &grid, &opts).map_err(scan_error)?;
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                summary: &'a ClaimSummary,
                meta: Meta<'a, VerifyArgs>,
            }
            emit_json(
                out,
                &Doc {
                    summary: &summary,
                    meta: meta("verify", a),
                },
            )?;
        }
        Format::Text => {
            emit_text(out, &verify_table(&summary))?;
        }
    }
    Ok(if summary.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn verify_table(s: &ClaimSummary) -> String {
    let mut t = format!("{}: {}\n", s.claim, s.claim.about());
    t.push_str(&format!(
        "{:>3} {:>3} {:>3} {:>3}  {:<9} detail\n",
        "n", "m", "i", "j", "status"
    ));
    for r in &s.tuples {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Uncovered => "uncovered",
        };
        let detail = r
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.detail {
                Some(d) => format!("{}: {d}", c.source),
                None => c.source.clone(),
            })
            .chain(
                r.checks
                    .is_empty()
                    .then(|| "no applicable construction".to_string()),
            )
            .collect::<Vec<_>>()
            .join("; ");
        let p = &r.params;
        t.push_str(
            format!(
                "{:>3} {:>3} {:>3} {:>3}  {:<9} {}\n",
                p.n, p.m, p.i, p.j, status, detail
            )
            .trim_end(),
        );
        t.push('\n');
    }
    t.push_str(&format!(
        "{} passed, {} failed, {} uncovered\n",
        s.passed, s.failed, s.uncovered
    ));
    t
}

pub const SWEEP_HEADER: &str =
    "family_f,k_f,family_g,k_g,n,m,relation,profiles_scanned,manip_f,manip_g,manip_both";

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    if a.n.lo == 0 {
        return Err(invalid("--n", "need at least one voter"));
    }
    if a.m.lo < 3 {
        return Err(invalid(
            "--m",
            "need at least three candidates for two distinct rules",
        ));
    }
    let families: &[Family] = match a.family {
        FamilyArg::Approval => &[Family::Approval],
        FamilyArg::Borda => &[Family::Borda],
        FamilyArg::Both => &[Family::Approval, Family::Borda],
    };
    for n in a.n.range() {
        for m in a.m.range() {
            let count = anonymous_profile_count(n, m).map_err(scan_error)?;
            if count > a.budget {
                return Err(invalid(
                    "--budget",
                    format!(
                        "cell n={n}, m={m} needs {count} profiles, budget is {}",
                        a.budget
                    ),
                ));
            }
        }
    }
    let within = |s: Option<Span>, v: usize| s.is_none_or(|s| s.range().contains(&v));
    let opts = scan_options(a.threads, a.budget, a.fast, true);
    let mut csv = format!("{SWEEP_HEADER}\n");
    for &family in families {
        for n in a.n.range() {
            for m in a.m.range() {
                for j in 2..m {
                    for i in 1..j {
                        if !within(a.i, i) || !within(a.j, j) {
                            continue;
                        }
                        let f = RuleSpec { family, k: j };
                        let g = RuleSpec { family, k: i };
                        let r = compare_exhaustive(&f, &g, n, m, &opts).map_err(scan_error)?;
                        let counts = match r.counts {
                            Some(c) => format!(
                                "{},{},{},{}",
                                c.profiles_scanned, c.manip_f, c.manip_g, c.manip_both
                            ),
                            None => ",,,".to_string(),
                        };
                        csv.push_str(&format!(
                            "{family},{j},{family},{i},{n},{m},{},{counts}\n",
                            r.relation
                        ));
                    }
                }
            }
        }
    }
    emit_text(out, &csv)
}
