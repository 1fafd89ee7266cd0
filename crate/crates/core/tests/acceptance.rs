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

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use psmanip::ballots::{enumerate_anonymous_profiles, enumerate_orders, expand, Profile};
use psmanip::compare::{compare_exhaustive, Relation, ScanOptions};
use psmanip::manipulation::{brute_force_manipulation_with, find_manipulation_with};
use psmanip::scoring::{scoring_vector, tally, RuleSpec};
use psmanip::witnesses::{verify_claim, ClaimId, Grid, Status, VerifyOptions};
use psmanip::LinearOrder;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    summary: String,
    problems: Vec<String>,
}

impl Outcome {
    fn new(summary: String, problems: Vec<String>) -> Self {
        Outcome {
            passed: problems.is_empty(),
            summary,
            problems,
        }
    }
}

fn rules(m: usize) -> Vec<RuleSpec> {
    (1..m)
        .map(RuleSpec::approval)
        .chain((1..m).map(RuleSpec::borda))
        .collect()
}

fn relation(f: RuleSpec, g: RuleSpec, n: usize, m: usize) -> Relation {
    compare_exhaustive(&f, &g, n, m, &ScanOptions::default())
        .expect("scan fits the default budget")
        .relation
}

fn expect_relation(
    problems: &mut Vec<String>,
    checked: &mut usize,
    f: RuleSpec,
    g: RuleSpec,
    n: usize,
    m: usize,
    want: Relation,
) {
    *checked += 1;
    let got = relation(f, g, n, m);
    if got != want {
        problems.push(format!(
            "{f} vs {g} at n={n}, m={m}: {got}, expected {want}"
        ));
    }
}

fn oracle_equivalence() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0u64;
    for n in 2..=3 {
        for m in 3..=4 {
            let orders = enumerate_orders(m).unwrap();
            let vectors: Vec<_> = rules(m)
                .iter()
                .map(|r| (*r, scoring_vector(r, m).unwrap()))
                .collect();
            for a in enumerate_anonymous_profiles(n, m).unwrap() {
                let p = expand(&a);
                for (rule, v) in &vectors {
                    checked += 1;
                    let fast = find_manipulation_with(&p, v).is_some();
                    let slow = brute_force_manipulation_with(&p, v, &orders).is_some();
                    if fast != slow {
                        problems.push(format!(
                            "{rule} at {}: normal form {fast}, brute force {slow}",
                            json(&p)
                        ));
                    }
                }
            }
        }
    }
    Outcome::new(
        format!(
            "{checked} (profile, rule) pairs, {} discrepancies",
            problems.len()
        ),
        problems,
    )
}

fn approval_incomparable() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    let cells = [(2, 3), (2, 4), (3, 3), (3, 4), (4, 3), (4, 4), (2, 5)];
    for (n, m) in cells {
        for j in 2..m {
            for i in 1..j {
                expect_relation(
                    &mut problems,
                    &mut checked,
                    RuleSpec::approval(j),
                    RuleSpec::approval(i),
                    n,
                    m,
                    Relation::Incomparable,
                );
            }
        }
    }
    Outcome::new(format!("{checked} comparisons"), problems)
}

fn borda_n2_hierarchy() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    for m in 4..=5 {
        for k in 1..m - 2 {
            expect_relation(
                &mut problems,
                &mut checked,
                RuleSpec::borda(k + 1),
                RuleSpec::borda(k),
                2,
                m,
                Relation::FStrictlyMore,
            );
        }
        for j in 2..=m - 2 {
            for i in 1..j {
                expect_relation(
                    &mut problems,
                    &mut checked,
                    RuleSpec::borda(j),
                    RuleSpec::borda(i),
                    2,
                    m,
                    Relation::FStrictlyMore,
                );
            }
        }
    }
    Outcome::new(format!("{checked} comparisons"), problems)
}

fn borda_incomparable() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    for n in 3..=4 {
        for m in 3..=4 {
            for j in 2..m {
                for i in 1..j {
                    expect_relation(
                        &mut problems,
                        &mut checked,
                        RuleSpec::borda(j),
                        RuleSpec::borda(i),
                        n,
                        m,
                        Relation::Incomparable,
                    );
                }
            }
        }
    }
    for m in 4..=5 {
        for k in 1..m - 1 {
            expect_relation(
                &mut problems,
                &mut checked,
                RuleSpec::borda(m - 1),
                RuleSpec::borda(k),
                2,
                m,
                Relation::Incomparable,
            );
        }
    }
    Outcome::new(format!("{checked} comparisons"), problems)
}

fn witness_grid() -> Outcome {
    let grid = Grid::new(1..=8, 3..=7);
    let opts = VerifyOptions {
        oracle_max_m: 5,
        ..VerifyOptions::default()
    };
    let mut problems = Vec::new();
    let (mut passed, mut uncovered, mut oracle) = (0, 0, 0);
    for &claim in ClaimId::ALL {
        let s = verify_claim(claim, &grid, &opts).expect("grid runs");
        passed += s.passed;
        uncovered += s.uncovered;
        for t in &s.tuples {
            oracle += t.checks.iter().filter(|c| c.oracle_checked).count();
            if t.status == Status::Fail {
                let why: Vec<_> = t
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .filter_map(|c| c.detail.clone())
                    .collect();
                problems.push(format!("{claim} {}: {}", t.params, why.join("; ")));
            }
        }
    }
    Outcome::new(
        format!(
            "{passed} tuples passed, {} failed, {uncovered} uncovered, {oracle} checks confirmed by brute force",
            problems.len()
        ),
        problems,
    )
}

fn random_profile(rng: &mut ChaCha8Rng, m: usize) -> Profile {
    let n = rng.gen_range(1..=6);
    let ballots = (0..n)
        .map(|_| {
            let mut ids: Vec<u8> = (0..m as u8).collect();
            ids.shuffle(rng);
            LinearOrder::from_ids(&ids).unwrap()
        })
        .collect();
    Profile::new(m, ballots).unwrap()
}

fn profile_properties(p: &Profile, problems: &mut Vec<String>) {
    let (n, m) = (p.n(), p.m());
    let mut rev = p.ballots().to_vec();
    rev.reverse();
    let reversed = Profile::new(m, rev).unwrap();
    for rule in rules(m) {
        let v = scoring_vector(&rule, m).unwrap();
        let scores = tally(p, &v);
        let s = scores.as_slice();
        if scores.total() != n as u64 * v.per_ballot_total() {
            problems.push(format!("conservation: {rule} at {}", json(p)));
        }
        let max = *s.iter().max().unwrap();
        let first = s.iter().position(|&x| x == max).unwrap();
        if scores.winner().index() != first {
            problems.push(format!("tie-breaking: {rule} at {}", json(p)));
        }
        let w = find_manipulation_with(p, &v);
        if tally(&reversed, &v) != scores
            || find_manipulation_with(&reversed, &v).is_some() != w.is_some()
        {
            problems.push(format!("anonymity: {rule} at {}", json(p)));
        }
        if let Some(w) = &w {
            if !w.certifies(p, &v) {
                problems.push(format!("self-certification: {rule} at {}", json(p)));
            }
        }
    }
    for k in 1..m.saturating_sub(1) {
        let lo = tally(p, &scoring_vector(&RuleSpec::borda(k), m).unwrap());
        let hi = tally(p, &scoring_vector(&RuleSpec::borda(k + 1), m).unwrap());
        for c in 0..m {
            let (a, b) = (lo.as_slice()[c], hi.as_slice()[c]);
            if b < a || b - a > n as u64 {
                problems.push(format!(
                    "shift bound: borda:{k} -> borda:{} candidate {c} at {}",
                    k + 1,
                    json(p)
                ));
            }
        }
    }
}

fn property_suite() -> Outcome {
    let mut problems = Vec::new();
    let mut profiles = 0;
    for n in 1..=3 {
        for m in 2..=4 {
            for a in enumerate_anonymous_profiles(n, m).unwrap() {
                profiles += 1;
                profile_properties(&expand(&a), &mut problems);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_101);
    for m in 5..=7 {
        for _ in 0..1000 {
            profiles += 1;
            profile_properties(&random_profile(&mut rng, m), &mut problems);
        }
    }
    let mut mirrors = 0;
    for n in 1..=3 {
        for m in 3..=4 {
            let rs = rules(m);
            for (x, f) in rs.iter().enumerate() {
                for g in &rs[x + 1..] {
                    mirrors += 1;
                    let fg = relation(*f, *g, n, m);
                    let gf = relation(*g, *f, n, m);
                    if fg.transpose() != gf {
                        problems.push(format!("mirror: {f} vs {g} at n={n}, m={m}: {fg} / {gf}"));
                    }
                }
            }
        }
    }
    Outcome::new(
        format!(
            "{profiles} profiles, {mirrors} mirrored comparisons, {} violations",
            problems.len()
        ),
        problems,
    )
}

fn json(p: &Profile) -> String {
    serde_json::to_string(p).unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        (
            "1 oracle equivalence (n in 2..3, m in 3..4)",
            oracle_equivalence,
        ),
        (
            "2 approval rules pairwise incomparable",
            approval_incomparable,
        ),
        ("3 borda hierarchy at n=2", borda_n2_hierarchy),
        (
            "4 borda incomparable for n>2 and for borda:m-1",
            borda_incomparable,
        ),
        ("5 witness grid n<=8, m<=7", witness_grid),
        ("6 property suite", property_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} [{secs:.1}s]", outcome.summary);
        for p in outcome.problems.iter().take(25) {
            println!("    {p}");
        }
        if outcome.problems.len() > 25 {
            println!("    ... {} more", outcome.problems.len() - 25);
        }
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} of 6 criteria passed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
