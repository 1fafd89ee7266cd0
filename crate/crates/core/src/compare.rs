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

//! Exhaustive comparison of two rules under the Pathak–Sönmez ordering.
//!
//! `f ≥ g` holds at `(n, m)` when every profile at which `g` is manipulable
//! is also one at which `f` is manipulable. The scan visits every anonymous
//! profile (or every ordered profile with `anonymize = false`), records how
//! often each rule is manipulable, and keeps the first profile, in canonical
//! order, that breaks each inclusion.
//!
//! Work is split by the index of the first ballot. Chunks are merged in
//! index order, so the report does not depend on the number of threads.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballots::{
    anonymous_profile_count, enumerate_orders_up_to, ordered_profile_count, AnonymousProfile,
    LinearOrder, Multisets, Profile, Tuples, DEFAULT_MAX_CANDIDATES,
};
use crate::error::{Error, Result};
use crate::manipulation::find_manipulation_with;
use crate::scoring::{scoring_vector, RuleSpec, ScoringVector};

/// Default ceiling on the number of profiles a scan may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Equivalent,
    FStrictlyMore,
    GStrictlyMore,
    Incomparable,
}

impl Relation {
    pub fn from_inclusions(f_geq_g: bool, g_geq_f: bool) -> Self {
        match (f_geq_g, g_geq_f) {
            (true, true) => Relation::Equivalent,
            (true, false) => Relation::FStrictlyMore,
            (false, true) => Relation::GStrictlyMore,
            (false, false) => Relation::Incomparable,
        }
    }

    /// The relation with `f` and `g` swapped.
    pub fn transpose(self) -> Self {
        match self {
            Relation::FStrictlyMore => Relation::GStrictlyMore,
            Relation::GStrictlyMore => Relation::FStrictlyMore,
            r => r,
        }
    }

    /// `f ≥ g`.
    pub fn f_geq_g(self) -> bool {
        matches!(self, Relation::Equivalent | Relation::FStrictlyMore)
    }

    pub fn g_geq_f(self) -> bool {
        self.transpose().f_geq_g()
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Equivalent => "Equivalent",
            Relation::FStrictlyMore => "FStrictlyMore",
            Relation::GStrictlyMore => "GStrictlyMore",
            Relation::Incomparable => "Incomparable",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub profiles_scanned: u64,
    pub manip_f: u64,
    pub manip_g: u64,
    pub manip_both: u64,
}

impl Counts {
    fn merge(&mut self, other: &Counts) {
        self.profiles_scanned += other.profiles_scanned;
        self.manip_f += other.manip_f;
        self.manip_g += other.manip_g;
        self.manip_both += other.manip_both;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    /// Maximum number of profiles to visit.
    pub budget: u128,
    /// Worker threads; `None` lets rayon decide, `Some(1)` runs inline.
    pub threads: Option<usize>,
    /// Scan multisets of ballots instead of ordered tuples.
    pub anonymize: bool,
    /// Stop as soon as both witnesses are known; counts are then omitted.
    pub fast: bool,
    pub max_candidates: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_BUDGET,
            threads: None,
            anonymize: true,
            fast: false,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl ScanOptions {
    pub fn sequential() -> Self {
        ScanOptions {
            threads: Some(1),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub rule_f: RuleSpec,
    pub rule_g: RuleSpec,
    pub n: usize,
    pub m: usize,
    pub relation: Relation,
    /// First profile where `g` is manipulable and `f` is not.
    pub witness_g_not_f: Option<AnonymousProfile>,
    /// First profile where `f` is manipulable and `g` is not.
    pub witness_f_not_g: Option<AnonymousProfile>,
    /// Absent in fast mode.
    pub counts: Option<Counts>,
    pub anonymized: bool,
}

impl Serialize for ComparisonReport {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Witnesses<'a> {
            g_not_f: &'a Option<AnonymousProfile>,
            f_not_g: &'a Option<AnonymousProfile>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            f: String,
            g: String,
            n: usize,
            m: usize,
            mode: &'static str,
            relation: Relation,
            witnesses: Witnesses<'a>,
            counts: &'a Option<Counts>,
        }
        Doc {
            f: self.rule_f.to_string(),
            g: self.rule_g.to_string(),
            n: self.n,
            m: self.m,
            mode: if self.anonymized {
                "anonymous"
            } else {
                "ordered"
            },
            relation: self.relation,
            witnesses: Witnesses {
                g_not_f: &self.witness_g_not_f,
                f_not_g: &self.witness_f_not_g,
            },
            counts: &self.counts,
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Never,
    BothWitnesses,
    GNotF,
}

#[derive(Debug, Default)]
struct Chunk {
    counts: Counts,
    g_not_f: Option<Vec<usize>>,
    f_not_g: Option<Vec<usize>>,
}

impl Chunk {
    fn done(&self, stop: Stop) -> bool {
        match stop {
            Stop::Never => false,
            Stop::BothWitnesses => self.g_not_f.is_some() && self.f_not_g.is_some(),
            Stop::GNotF => self.g_not_f.is_some(),
        }
    }
}

struct Scan<'a> {
    n: usize,
    m: usize,
    orders: &'a [LinearOrder],
    f: &'a ScoringVector,
    g: &'a ScoringVector,
    anonymize: bool,
    stop: Stop,
}

impl Scan<'_> {
    fn chunk(&self, first: usize) -> Chunk {
        let base = self.orders.len();
        let stream: Box<dyn Iterator<Item = Vec<usize>>> = if self.anonymize {
            Box::new(Multisets::with_first(self.n, base, first))
        } else {
            Box::new(Tuples::with_first(self.n, base, first))
        };
        let mut out = Chunk::default();
        for ix in stream {
            let ballots = ix.iter().map(|&i| self.orders[i].clone()).collect();
            let p = Profile::new(self.m, ballots).expect("enumerated ballots are valid");
            let in_g = find_manipulation_with(&p, self.g).is_some();
            // Only the g-not-f direction matters for inclusion checks.
            if self.stop == Stop::GNotF && !in_g {
                out.counts.profiles_scanned += 1;
                continue;
            }
            let in_f = find_manipulation_with(&p, self.f).is_some();
            out.counts.profiles_scanned += 1;
            out.counts.manip_f += u64::from(in_f);
            out.counts.manip_g += u64::from(in_g);
            out.counts.manip_both += u64::from(in_f && in_g);
            if in_g && !in_f && out.g_not_f.is_none() {
                out.g_not_f = Some(ix.clone());
            }
            if in_f && !in_g && out.f_not_g.is_none() {
                out.f_not_g = Some(ix);
            }
            if out.done(self.stop) {
                break;
            }
        }
        out
    }

    fn run(&self, threads: Option<usize>) -> Result<Chunk> {
        let base = self.orders.len();
        let mut merged = Chunk::default();
        let absorb = |chunk: Chunk, merged: &mut Chunk| {
            merged.counts.merge(&chunk.counts);
            if merged.g_not_f.is_none() {
                merged.g_not_f = chunk.g_not_f;
            }
            if merged.f_not_g.is_none() {
                merged.f_not_g = chunk.f_not_g;
            }
        };
        if threads == Some(1) {
            for first in 0..base {
                absorb(self.chunk(first), &mut merged);
                if merged.done(self.stop) {
                    break;
                }
            }
            return Ok(merged);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidProfile(format!("thread pool: {e}")))?;
        // Batches are merged in index order; a stop is only taken between
        // batches so the earliest witnesses are always in the merged prefix.
        let batch = match self.stop {
            Stop::Never => base,
            _ => pool.current_num_threads().max(1) * 4,
        };
        let mut start = 0;
        while start < base {
            let end = (start + batch).min(base);
            let chunks: Vec<Chunk> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|first| self.chunk(first))
                    .collect()
            });
            for chunk in chunks {
                absorb(chunk, &mut merged);
            }
            if merged.done(self.stop) {
                break;
            }
            start = end;
        }
        Ok(merged)
    }
}

struct Prepared {
    orders: Vec<LinearOrder>,
    vf: ScoringVector,
    vg: ScoringVector,
}

fn prepare(f: &RuleSpec, g: &RuleSpec, n: usize, m: usize, opts: &ScanOptions) -> Result<Prepared> {
    if n == 0 {
        return Err(Error::InvalidProfile("n must be at least 1".into()));
    }
    let orders = enumerate_orders_up_to(m, opts.max_candidates)?;
    let vf = scoring_vector(f, m)?;
    let vg = scoring_vector(g, m)?;
    let count = if opts.anonymize {
        anonymous_profile_count(n, m)?
    } else {
        ordered_profile_count(n, m)?
    };
    if count > opts.budget {
        return Err(Error::BudgetExceeded {
            count,
            budget: opts.budget,
        });
    }
    Ok(Prepared { orders, vf, vg })
}

/// Relation between `f` and `g` at `(n, m)` with supporting witnesses.
pub fn compare_exhaustive(
    f: &RuleSpec,
    g: &RuleSpec,
    n: usize,
    m: usize,
    opts: &ScanOptions,
) -> Result<ComparisonReport> {
    let prep = prepare(f, g, n, m, opts)?;
    let scan = Scan {
        n,
        m,
        orders: &prep.orders,
        f: &prep.vf,
        g: &prep.vg,
        anonymize: opts.anonymize,
        stop: if opts.fast {
            Stop::BothWitnesses
        } else {
            Stop::Never
        },
    };
    let result = scan.run(opts.threads)?;
    let to_profile =
        |ix: Option<Vec<usize>>| ix.map(|ix| AnonymousProfile::from_indices(m, &prep.orders, &ix));
    Ok(ComparisonReport {
        rule_f: *f,
        rule_g: *g,
        n,
        m,
        relation: Relation::from_inclusions(result.g_not_f.is_none(), result.f_not_g.is_none()),
        witness_g_not_f: to_profile(result.g_not_f),
        witness_f_not_g: to_profile(result.f_not_g),
        counts: (!opts.fast).then_some(result.counts),
        anonymized: opts.anonymize,
    })
}

/// First profile where `g` is manipulable and `f` is not, i.e. a
/// counterexample to `f ≥ g`; `None` if the inclusion holds at `(n, m)`.
pub fn check_inclusion(
    f: &RuleSpec,
    g: &RuleSpec,
    n: usize,
    m: usize,
    opts: &ScanOptions,
) -> Result<Option<AnonymousProfile>> {
    let prep = prepare(f, g, n, m, opts)?;
    let scan = Scan {
        n,
        m,
        orders: &prep.orders,
        f: &prep.vf,
        g: &prep.vg,
        anonymize: opts.anonymize,
        stop: Stop::GNotF,
    };
    let result = scan.run(opts.threads)?;
    Ok(result
        .g_not_f
        .map(|ix| AnonymousProfile::from_indices(m, &prep.orders, &ix)))
}
