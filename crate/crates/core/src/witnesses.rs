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

//! Counterexample profiles separating pairs of rules, and their verification.
//!
//! Every construction is a table of voter types, each a concatenation of
//! blocks of lettered candidates such as `B_1 … B_i` or `C_{m-2} … C_1`.
//! Letters are turned into ids alphabetically, then by subscript, so that
//! the tie-breaking order matches the lettering (`A_3` beats `A_5` beats
//! `B_1`). Index ranges that run the wrong way render as empty blocks.
//!
//! A [`WitnessCase`] claims that its profile is manipulable under one rule
//! and not under the other. [`verify_witness`] checks the claim with the
//! normal-form test and [`verify_claim`] runs a construction, or a
//! composition of constructions, over a parameter grid.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::ballots::{
    enumerate_orders_up_to, Candidate, LinearOrder, Profile, MAX_REPRESENTABLE_CANDIDATES,
};
use crate::compare::{check_inclusion, ScanOptions};
use crate::error::{Error, Result};
use crate::manipulation::{
    brute_force_manipulation_with, find_manipulation_with, ManipulationWitness,
};
use crate::scoring::{scoring_vector, tally, RuleSpec, ScoreTable};

macro_rules! claims {
    ($($variant:ident => $name:literal, $about:literal;)*) => {
        /// A construction, or a composition of constructions, to verify.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum ClaimId {
            $(#[doc = $about] $variant,)*
        }

        impl ClaimId {
            pub const ALL: &'static [ClaimId] = &[$(ClaimId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(ClaimId::$variant => $name,)*
                }
            }

            pub fn about(self) -> &'static str {
                match self {
                    $(ClaimId::$variant => $about,)*
                }
            }
        }
    };
}

claims! {
    ApprovalINotGeqJ => "APPROVAL_I_NOT_GEQ_J", "α_i ≱ α_j for every n and m";
    ApprovalJNotGeqIEven => "APPROVAL_J_NOT_GEQ_I_EVEN", "α_j ≱ α_i for even n and m ≥ 2j-1";
    ApprovalJNotGeqIOdd => "APPROVAL_J_NOT_GEQ_I_ODD", "α_j ≱ α_i for odd n, m ≥ 2j-1 and i ≥ 2";
    ApprovalJNotGeq1 => "APPROVAL_J_NOT_GEQ_1", "α_j ≱ α_1";
    ApprovalJNotGeqISmallM => "APPROVAL_J_NOT_GEQ_I_SMALLM", "α_j ≱ α_i for m < 2j and i ≥ 2";
    BordaINotGeqJEven => "BORDA_I_NOT_GEQ_J_EVEN", "β_i ≱ β_j for even n";
    BordaINotGeqJOdd => "BORDA_I_NOT_GEQ_J_ODD", "β_i ≱ β_j for odd n";
    BordaJNotGeqIOdd => "BORDA_J_NOT_GEQ_I_ODD", "β_j ≱ β_i for odd n";
    BordaJNotGeqIEven => "BORDA_J_NOT_GEQ_I_EVEN", "β_j ≱ β_i for even n ≥ 6";
    BordaJNotGeqIN4 => "BORDA_J_NOT_GEQ_I_N4", "β_j ≱ β_i for n = 4";
    BordaFullNotGeqK => "BORDA_FULL_NOT_GEQ_K", "β_{m-1} ≱ β_k for n = 2";
    CorApprovalJNotGeqI => "COR_APPROVAL_J_NOT_GEQ_I", "α_j ≱ α_i, choosing the construction by n, m and i";
    CorBordaINotGeqJ => "COR_BORDA_I_NOT_GEQ_J", "β_i ≱ β_j, choosing the construction by parity of n";
    CorBordaJNotGeqI => "COR_BORDA_J_NOT_GEQ_I", "β_j ≱ β_i for n > 2, choosing the construction by n";
    ThmApprovalIncomparable => "THM_APPROVAL_INCOMPARABLE", "α_i and α_j are incomparable";
    ThmBordaIncomparable => "THM_BORDA_INCOMPARABLE", "β_i and β_j are incomparable for n > 2";
    BordaN2Hierarchy => "BORDA_N2_HIERARCHY", "β_{k+1} > β_k at n = 2 for k < m-2, by exhaustive scan";
    BordaN2FullIncomparable => "BORDA_N2_FULL_INCOMPARABLE", "β_{m-1} and β_k are incomparable at n = 2";
}

impl ClaimId {
    /// True for the claims backed by a single profile construction.
    pub fn is_construction(self) -> bool {
        self <= ClaimId::BordaFullNotGeqK
    }

    /// Constructions containing blocks the voters may rank in any order.
    pub fn has_free_blocks(self) -> bool {
        self == ClaimId::ApprovalJNotGeqISmallM
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

impl Serialize for ClaimId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Parameters of a construction: `n` voters, `m` candidates and the pair of
/// rule indices `i < j`. Constructions with a single index `k` against the
/// full Borda rule take `i = k` and `j = m - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub i: usize,
    pub j: usize,
}

impl Params {
    pub fn new(n: usize, m: usize, i: usize, j: usize) -> Self {
        Params { n, m, i, j }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} i={} j={}", self.n, self.m, self.i, self.j)
    }
}

/// How to fill blocks the construction leaves in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreeOrder {
    #[default]
    Ascending,
    Seeded(u64),
}

/// A profile together with the pair of rules it separates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCase {
    pub claim: ClaimId,
    pub params: Params,
    pub profile: Profile,
    pub manip_rule: RuleSpec,
    pub robust_rule: RuleSpec,
}

/// Candidate groups named by letter, laid out alphabetically.
struct Letters {
    groups: Vec<(char, usize, usize)>,
}

impl Letters {
    fn new(groups: &[(char, i64)]) -> Self {
        let mut offset = 0;
        let groups = groups
            .iter()
            .map(|&(letter, count)| {
                let count = count.max(0) as usize;
                let g = (letter, count, offset);
                offset += count;
                g
            })
            .collect();
        Letters { groups }
    }

    fn m(&self) -> usize {
        self.groups.iter().map(|g| g.1).sum()
    }

    fn id(&self, letter: char, sub: i64) -> std::result::Result<Candidate, String> {
        let &(_, count, offset) = self
            .groups
            .iter()
            .find(|g| g.0 == letter)
            .ok_or_else(|| format!("no {letter} candidates"))?;
        if sub < 1 || sub as usize > count {
            return Err(format!(
                "{letter}_{sub} does not exist ({count} {letter} candidates)"
            ));
        }
        Ok(Candidate((offset + sub as usize - 1) as u8))
    }

    fn all(&self, letter: char) -> Vec<Candidate> {
        let count = self
            .groups
            .iter()
            .find(|g| g.0 == letter)
            .map_or(0, |g| g.1);
        (1..=count as i64)
            .map(|s| self.id(letter, s).unwrap())
            .collect()
    }

    fn row(&self) -> Row<'_> {
        Row {
            letters: self,
            ids: Vec::new(),
            err: None,
        }
    }
}

struct Row<'a> {
    letters: &'a Letters,
    ids: Vec<Candidate>,
    err: Option<String>,
}

impl Row<'_> {
    fn push(&mut self, letter: char, sub: i64) {
        match self.letters.id(letter, sub) {
            Ok(c) => self.ids.push(c),
            Err(e) => {
                self.err.get_or_insert(e);
            }
        }
    }

    /// The single candidate of a one-member group, or `X_1`.
    fn one(mut self, letter: char) -> Self {
        self.push(letter, 1);
        self
    }

    fn sub(mut self, letter: char, sub: i64) -> Self {
        self.push(letter, sub);
        self
    }

    /// `X_from … X_to` ascending; empty when `from > to`.
    fn up(mut self, letter: char, from: i64, to: i64) -> Self {
        for s in from..=to {
            self.push(letter, s);
        }
        self
    }

    /// `X_from … X_to` descending; empty when `from < to`.
    fn down(mut self, letter: char, from: i64, to: i64) -> Self {
        for s in (to..=from).rev() {
            self.push(letter, s);
        }
        self
    }

    fn then(mut self, ids: &[Candidate]) -> Self {
        self.ids.extend_from_slice(ids);
        self
    }

    fn finish(self) -> std::result::Result<LinearOrder, String> {
        if let Some(e) = self.err {
            return Err(e);
        }
        let m = self.letters.m();
        if self.ids.len() != m {
            return Err(format!("row ranks {} of {m} candidates", self.ids.len()));
        }
        LinearOrder::new(self.ids).map_err(|e| e.to_string())
    }
}

fn param_error(claim: ClaimId, bound: impl Into<String>) -> Error {
    Error::Parameter {
        claim: claim.name().to_string(),
        bound: bound.into(),
    }
}

fn require(claim: ClaimId, ok: bool, bound: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(param_error(claim, bound))
    }
}

/// Checks the preconditions of a construction.
pub fn check_params(claim: ClaimId, p: &Params) -> Result<()> {
    if !claim.is_construction() {
        return Err(param_error(
            claim,
            "not a single construction; use verify_claim",
        ));
    }
    let Params { n, m, i, j } = *p;
    require(claim, m <= MAX_REPRESENTABLE_CANDIDATES, "m <= 256")?;
    require(claim, i >= 1, "i >= 1")?;
    require(claim, i < j, "i < j")?;
    require(claim, j < m, "j <= m-1")?;
    require(claim, n >= 2, "n >= 2")?;
    match claim {
        ClaimId::ApprovalINotGeqJ => Ok(()),
        ClaimId::ApprovalJNotGeqIEven => {
            require(claim, n % 2 == 0, "n even")?;
            require(claim, m + 1 >= 2 * j, "m >= 2j-1")
        }
        ClaimId::ApprovalJNotGeqIOdd => {
            require(claim, n % 2 == 1, "n odd")?;
            require(claim, m + 1 >= 2 * j, "m >= 2j-1")?;
            require(claim, i >= 2, "i >= 2")
        }
        ClaimId::ApprovalJNotGeq1 => require(claim, i == 1, "i = 1"),
        ClaimId::ApprovalJNotGeqISmallM => {
            require(claim, m < 2 * j, "m < 2j")?;
            require(claim, i >= 2, "i >= 2")?;
            // Below i + j the first voter type needs i-(m-j) >= 1 B candidates
            // out of j-i; that only fits when m >= 2i.
            require(claim, m >= i + j || m >= 2 * i, "m >= 2i when m < i+j")
        }
        ClaimId::BordaINotGeqJEven => require(claim, n % 2 == 0, "n even"),
        ClaimId::BordaINotGeqJOdd => require(claim, n % 2 == 1, "n odd"),
        ClaimId::BordaJNotGeqIOdd => require(claim, n % 2 == 1, "n odd"),
        ClaimId::BordaJNotGeqIEven => {
            require(claim, n % 2 == 0, "n even")?;
            require(claim, n / 2 > 2, "n/2 > 2")
        }
        ClaimId::BordaJNotGeqIN4 => require(claim, n == 4, "n = 4"),
        ClaimId::BordaFullNotGeqK => {
            require(claim, n == 2, "n = 2")?;
            require(claim, j == m - 1, "j = m-1")
        }
        _ => unreachable!("compositions rejected above"),
    }
}

/// Rules `(manipulable, robust)` a construction separates.
fn rules(claim: ClaimId, p: &Params) -> (RuleSpec, RuleSpec) {
    use ClaimId::*;
    let (i, j) = (p.i, p.j);
    match claim {
        ApprovalINotGeqJ => (RuleSpec::approval(j), RuleSpec::approval(i)),
        ApprovalJNotGeqIEven | ApprovalJNotGeqIOdd | ApprovalJNotGeq1 | ApprovalJNotGeqISmallM => {
            (RuleSpec::approval(i), RuleSpec::approval(j))
        }
        BordaINotGeqJEven | BordaINotGeqJOdd => (RuleSpec::borda(j), RuleSpec::borda(i)),
        BordaJNotGeqIOdd | BordaJNotGeqIEven | BordaJNotGeqIN4 | BordaFullNotGeqK => {
            (RuleSpec::borda(i), RuleSpec::borda(j))
        }
        _ => unreachable!("compositions have no single rule pair"),
    }
}

/// Voter types as `(count, ballot)` pairs, or one ballot per voter when free
/// blocks make voters of the same type differ.
enum Rows {
    Typed(Vec<(usize, LinearOrder)>),
    PerVoter(Vec<LinearOrder>),
}

fn construct(claim: ClaimId, p: &Params, free: FreeOrder) -> std::result::Result<Rows, String> {
    use ClaimId::*;
    let (n, m, i, j) = (p.n as i64, p.m as i64, p.i as i64, p.j as i64);
    let count = |x: i64| x.max(0) as usize;
    let typed = |rows: Vec<(i64, Row<'_>)>| -> std::result::Result<Rows, String> {
        rows.into_iter()
            .map(|(c, r)| Ok((count(c), r.finish()?)))
            .collect::<std::result::Result<Vec<_>, String>>()
            .map(Rows::Typed)
    };
    match claim {
        ApprovalINotGeqJ => {
            let l = Letters::new(&[('A', j - i), ('B', i), ('C', m - j)]);
            typed(vec![
                (
                    n - 1,
                    l.row().up('B', 1, i).up('A', 1, j - i).up('C', 1, m - j),
                ),
                (
                    1,
                    l.row().up('B', 1, i).down('A', j - i, 1).up('C', 1, m - j),
                ),
            ])
        }
        ApprovalJNotGeqIEven => {
            let q = n / 2;
            let d = m - 2 * j + 1;
            let l = Letters::new(&[('A', 1), ('B', j - 1), ('C', j - 1), ('D', d)]);
            typed(vec![
                (
                    q,
                    l.row()
                        .up('B', 1, j - 1)
                        .one('A')
                        .up('C', 1, j - 1)
                        .up('D', 1, d),
                ),
                (
                    q - 1,
                    l.row()
                        .one('A')
                        .up('C', 1, j - 1)
                        .up('B', 1, j - 1)
                        .up('D', 1, d),
                ),
                (
                    1,
                    l.row()
                        .up('C', 1, j - 1)
                        .one('A')
                        .up('B', 1, j - 1)
                        .up('D', 1, d),
                ),
            ])
        }
        ApprovalJNotGeqIOdd => {
            let q = n / 2;
            let c = m - 2 * j + 1;
            let l = Letters::new(&[('A', j - 1), ('B', j), ('C', c)]);
            typed(vec![
                (
                    q,
                    l.row()
                        .up('A', 1, i)
                        .sub('B', 1)
                        .up('A', i + 1, j - 1)
                        .up('B', 2, j)
                        .up('C', 1, c),
                ),
                (
                    q,
                    l.row()
                        .down('B', i, 1)
                        .up('B', i + 1, j)
                        .up('A', 1, j - 1)
                        .up('C', 1, c),
                ),
                (1, l.row().up('B', 1, j).up('A', 1, j - 1).up('C', 1, c)),
            ])
        }
        ApprovalJNotGeq1 => {
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', 1), ('D', m - 3)]);
            fn tail<'a>(r: Row<'a>, mid: char, low: char, j: i64, m: i64) -> Row<'a> {
                r.one(mid).up('D', 1, j - 2).one(low).up('D', j - 1, m - 3)
            }
            let tail = |r, mid, low| tail(r, mid, low, j, m);
            let q = n / 2;
            if n % 2 == 0 {
                typed(vec![
                    (q, tail(l.row().one('B'), 'A', 'C')),
                    (q - 1, tail(l.row().one('A'), 'B', 'C')),
                    (1, tail(l.row().one('C'), 'A', 'B')),
                ])
            } else {
                typed(vec![
                    (q, tail(l.row().one('B'), 'C', 'A')),
                    (q, tail(l.row().one('A'), 'B', 'C')),
                    (1, tail(l.row().one('C'), 'B', 'A')),
                ])
            }
        }
        ApprovalJNotGeqISmallM if m >= i + j => {
            let c = m - (i + j);
            let l = Letters::new(&[('A', 2 * i), ('B', j - i), ('C', c)]);
            typed(vec![
                (
                    n / 2,
                    l.row()
                        .up('A', 1, i)
                        .up('B', 1, j - i)
                        .down('A', 2 * i, i + 1)
                        .up('C', 1, c),
                ),
                (
                    n - n / 2,
                    l.row()
                        .up('A', i + 1, 2 * i)
                        .up('B', 1, j - i)
                        .down('A', i, 1)
                        .up('C', 1, c),
                ),
            ])
        }
        ApprovalJNotGeqISmallM => {
            let a = m - j;
            let lead = i - a;
            let l = Letters::new(&[('A', a), ('B', j - i), ('C', i)]);
            let mut free_part = l.row().up('B', lead + 1, j - i).ids;
            free_part.extend(l.all('C'));
            let mut rng = match free {
                FreeOrder::Ascending => None,
                FreeOrder::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            };
            let mut ballots = Vec::with_capacity(p.n);
            for _ in 0..n - 1 {
                let mut rest = free_part.clone();
                if let Some(rng) = rng.as_mut() {
                    rest.shuffle(rng);
                }
                ballots.push(
                    l.row()
                        .up('B', 1, lead)
                        .up('A', 1, a)
                        .then(&rest)
                        .finish()?,
                );
            }
            ballots.push(
                l.row()
                    .up('C', 1, i)
                    .up('B', 1, j - i)
                    .up('A', 1, a)
                    .finish()?,
            );
            Ok(Rows::PerVoter(ballots))
        }
        BordaINotGeqJEven => {
            let q = n / 2;
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', m - 2)]);
            typed(vec![
                (
                    1,
                    l.row()
                        .one('A')
                        .up('C', 1, i - 1)
                        .up('C', i, j - 2)
                        .one('B')
                        .up('C', j - 1, m - 2),
                ),
                (1, l.row().one('B').one('A').down('C', m - 2, 1)),
                (q - 1, l.row().one('A').up('C', 1, m - 2).one('B')),
                (
                    q - 1,
                    l.row()
                        .one('B')
                        .down('C', m - 2, m - i)
                        .down('C', m - i - 1, m - j)
                        .down('C', m - j - 1, 1)
                        .one('A'),
                ),
            ])
        }
        BordaINotGeqJOdd => {
            let q = n / 2;
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', m - 2)]);
            typed(vec![
                (
                    1,
                    l.row()
                        .one('B')
                        .up('C', 1, i - 1)
                        .up('C', i, j - 2)
                        .one('A')
                        .up('C', j - 1, m - 2),
                ),
                (q, l.row().one('B').one('A').up('C', 1, m - 2)),
                (q, l.row().one('A').one('B').down('C', m - 2, 1)),
            ])
        }
        BordaJNotGeqIOdd => {
            let q = n / 2;
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', m - 2)]);
            typed(vec![
                (q, l.row().one('A').one('B').down('C', m - 2, 1)),
                (q - 1, l.row().one('B').one('A').up('C', 1, m - 2)),
                (1, l.row().one('B').up('C', 1, m - 2).one('A')),
                (
                    1,
                    l.row()
                        .up('C', 1, i)
                        .one('B')
                        .up('C', i + 1, m - 2)
                        .one('A'),
                ),
            ])
        }
        BordaJNotGeqIEven => {
            let q = n / 2;
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', m - 2)]);
            typed(vec![
                (q - 1, l.row().one('A').one('B').down('C', m - 2, 1)),
                (q - 2, l.row().one('B').one('A').up('C', 1, m - 2)),
                (1, l.row().one('B').up('C', 1, m - 2).one('A')),
                (
                    1,
                    l.row()
                        .up('C', 1, i)
                        .one('B')
                        .up('C', i + 1, m - 2)
                        .one('A'),
                ),
                (
                    1,
                    l.row()
                        .down('C', m - 2, m - i - 1)
                        .one('B')
                        .down('C', m - i - 2, 1)
                        .one('A'),
                ),
            ])
        }
        BordaJNotGeqIN4 => {
            let l = Letters::new(&[('A', 1), ('B', 1), ('C', m - 2)]);
            if i > 1 {
                typed(vec![
                    (2, l.row().one('B').down('C', m - 2, 1).one('A')),
                    (1, l.row().one('A').one('B').up('C', 1, m - 2)),
                    (
                        1,
                        l.row()
                            .one('A')
                            .up('C', 1, i - 1)
                            .up('C', i, j - 2)
                            .one('B')
                            .up('C', j - 1, m - 2),
                    ),
                ])
            } else {
                typed(vec![
                    (2, l.row().one('B').one('A').down('C', m - 2, 1)),
                    (1, l.row().one('A').up('C', 1, m - 2).one('B')),
                    (1, l.row().sub('C', 1).one('A').up('C', 2, m - 2).one('B')),
                ])
            }
        }
        BordaFullNotGeqK => {
            let l = Letters::new(&[('A', m - 2), ('B', 1), ('C', 1)]);
            typed(vec![
                (1, l.row().one('B').one('C').up('A', 1, m - 2)),
                (1, l.row().one('C').up('A', 1, m - 2).one('B')),
            ])
        }
        _ => unreachable!("compositions have no construction"),
    }
}

/// Builds the construction for `claim` at `params`, free blocks ascending.
pub fn build_witness(claim: ClaimId, params: Params) -> Result<WitnessCase> {
    build_witness_with(claim, params, FreeOrder::Ascending)
}

pub fn build_witness_with(claim: ClaimId, params: Params, free: FreeOrder) -> Result<WitnessCase> {
    check_params(claim, &params)?;
    let construction_error = |detail: String| Error::Construction {
        claim: claim.name().to_string(),
        detail,
    };
    let ballots = match construct(claim, &params, free).map_err(construction_error)? {
        Rows::Typed(rows) => rows
            .into_iter()
            .flat_map(|(count, b)| std::iter::repeat_n(b, count))
            .collect::<Vec<_>>(),
        Rows::PerVoter(ballots) => ballots,
    };
    if ballots.len() != params.n {
        return Err(construction_error(format!(
            "{} ballots for n={}",
            ballots.len(),
            params.n
        )));
    }
    let profile = Profile::new(params.m, ballots)?;
    let (manip_rule, robust_rule) = rules(claim, &params);
    Ok(WitnessCase {
        claim,
        params,
        profile,
        manip_rule,
        robust_rule,
    })
}

/// Outcome of checking one [`WitnessCase`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessVerification {
    pub passed: bool,
    /// A manipulation of the rule that should be manipulable.
    pub manipulation: Option<ManipulationWitness>,
    /// A manipulation of the rule that should be robust; present only on failure.
    pub robust_manipulation: Option<ManipulationWitness>,
    pub manip_scores: ScoreTable,
    pub robust_scores: ScoreTable,
}

/// True iff the manipulable rule is manipulable at the profile and the
/// robust rule is not.
pub fn verify_witness(case: &WitnessCase) -> Result<WitnessVerification> {
    let m = case.profile.m();
    let vm = scoring_vector(&case.manip_rule, m)?;
    let vr = scoring_vector(&case.robust_rule, m)?;
    let manipulation = find_manipulation_with(&case.profile, &vm);
    let robust_manipulation = find_manipulation_with(&case.profile, &vr);
    Ok(WitnessVerification {
        passed: manipulation.is_some() && robust_manipulation.is_none(),
        manipulation,
        robust_manipulation,
        manip_scores: tally(&case.profile, &vm),
        robust_scores: tally(&case.profile, &vr),
    })
}

/// Re-checks a case with the brute-force oracle, returning whether the
/// oracle agrees that exactly the manipulable rule is manipulable.
pub fn oracle_confirms(case: &WitnessCase, max_candidates: usize) -> Result<bool> {
    let m = case.profile.m();
    let orders = enumerate_orders_up_to(m, max_candidates)?;
    let vm = scoring_vector(&case.manip_rule, m)?;
    let vr = scoring_vector(&case.robust_rule, m)?;
    Ok(
        brute_force_manipulation_with(&case.profile, &vm, &orders).is_some()
            && brute_force_manipulation_with(&case.profile, &vr, &orders).is_none(),
    )
}

/// Parameter ranges for [`verify_claim`]. `i` and `j` default to every pair
/// `1 ≤ i < j ≤ m-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub n: RangeInclusive<usize>,
    pub m: RangeInclusive<usize>,
    pub i: Option<RangeInclusive<usize>>,
    pub j: Option<RangeInclusive<usize>>,
}

impl Grid {
    pub fn new(n: RangeInclusive<usize>, m: RangeInclusive<usize>) -> Self {
        Grid {
            n,
            m,
            i: None,
            j: None,
        }
    }

    pub fn tuples(&self) -> Vec<Params> {
        let mut out = Vec::new();
        for n in self.n.clone() {
            for m in self.m.clone() {
                for i in 1..m {
                    for j in i + 1..m {
                        let keep_i = self.i.as_ref().is_none_or(|r| r.contains(&i));
                        let keep_j = self.j.as_ref().is_none_or(|r| r.contains(&j));
                        if keep_i && keep_j {
                            out.push(Params { n, m, i, j });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Base seed for reorderings of free blocks.
    pub seed: u64,
    /// Extra seeded reorderings per tuple for constructions with free blocks.
    pub reorderings: usize,
    /// Cross-check with the brute-force oracle up to this many candidates.
    pub oracle_max_m: usize,
    pub threads: Option<usize>,
    /// Options for exhaustive scans (hierarchy claims).
    pub scan: ScanOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            reorderings: 10,
            oracle_max_m: 5,
            threads: None,
            scan: ScanOptions::sequential(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Uncovered,
}

/// One check within a tuple: a construction (and free-block ordering), or an
/// exhaustive inclusion scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub source: String,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub oracle_checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleResult {
    pub params: Params,
    pub status: Status,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimSummary {
    pub claim: ClaimId,
    pub passed: usize,
    pub failed: usize,
    pub uncovered: usize,
    pub tuples: Vec<TupleResult>,
}

impl ClaimSummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn statement(case_claim: ClaimId, p: &Params) -> String {
    let (manip, robust) = rules(case_claim, p);
    format!("{robust} not >= {manip}")
}

fn run_construction(claim: ClaimId, p: &Params, opts: &VerifyOptions) -> Vec<Check> {
    let mut orders = vec![(None, FreeOrder::Ascending)];
    if claim.has_free_blocks() {
        for r in 0..opts.reorderings as u64 {
            let seed = opts.seed.wrapping_add(r);
            orders.push((Some(seed), FreeOrder::Seeded(seed)));
        }
    }
    orders
        .into_iter()
        .map(|(seed, free)| {
            let mut check = Check {
                source: claim.name().to_string(),
                statement: statement(claim, p),
                seed,
                passed: false,
                oracle_checked: false,
                detail: None,
            };
            let case = match build_witness_with(claim, *p, free) {
                Ok(case) => case,
                Err(e) => {
                    check.detail = Some(e.to_string());
                    return check;
                }
            };
            match verify_witness(&case) {
                Ok(v) if v.passed => check.passed = true,
                Ok(v) => {
                    check.detail = Some(if v.manipulation.is_none() {
                        format!(
                            "construction-reading failure: {} is not manipulable",
                            case.manip_rule
                        )
                    } else {
                        let w = v.robust_manipulation.expect("robust side failed");
                        format!(
                            "construction-reading failure: {} is manipulable by voter {} via {}",
                            case.robust_rule, w.voter, w.misreport
                        )
                    })
                }
                Err(e) => check.detail = Some(e.to_string()),
            }
            if check.passed && p.m <= opts.oracle_max_m {
                check.oracle_checked = true;
                match oracle_confirms(&case, opts.oracle_max_m) {
                    Ok(true) => {}
                    Ok(false) => {
                        check.passed = false;
                        check.detail = Some("brute-force oracle disagrees".into());
                    }
                    Err(e) => {
                        check.passed = false;
                        check.detail = Some(e.to_string());
                    }
                }
            }
            check
        })
        .collect()
}

/// Constructions proving `α_j ≱ α_i`, chosen by `n`, `m` and `i`.
fn approval_j_not_geq_i(p: &Params) -> Option<ClaimId> {
    if p.n < 2 {
        return None;
    }
    Some(if p.m >= 2 * p.j {
        if p.n.is_multiple_of(2) {
            ClaimId::ApprovalJNotGeqIEven
        } else if p.i >= 2 {
            ClaimId::ApprovalJNotGeqIOdd
        } else {
            ClaimId::ApprovalJNotGeq1
        }
    } else if p.i == 1 {
        ClaimId::ApprovalJNotGeq1
    } else {
        ClaimId::ApprovalJNotGeqISmallM
    })
}

fn borda_i_not_geq_j(p: &Params) -> Option<ClaimId> {
    match p.n {
        0 | 1 => None,
        n if n % 2 == 0 => Some(ClaimId::BordaINotGeqJEven),
        _ => Some(ClaimId::BordaINotGeqJOdd),
    }
}

fn borda_j_not_geq_i(p: &Params) -> Option<ClaimId> {
    match p.n {
        n if n % 2 == 1 => Some(ClaimId::BordaJNotGeqIOdd),
        4 => Some(ClaimId::BordaJNotGeqIN4),
        n if n / 2 > 2 => Some(ClaimId::BordaJNotGeqIEven),
        _ => None,
    }
}

/// Whether `claim` says anything about the tuple at all.
fn in_scope(claim: ClaimId, p: &Params) -> bool {
    use ClaimId::*;
    match claim {
        c if c.is_construction() => check_params(c, p).is_ok(),
        CorBordaJNotGeqI | ThmBordaIncomparable => p.n > 2,
        BordaN2Hierarchy => p.n == 2 && p.j == p.i + 1 && p.i + 2 < p.m,
        BordaN2FullIncomparable => p.n == 2 && p.j == p.m - 1,
        _ => true,
    }
}

/// `None` when the scan does not fit the budget, leaving the tuple uncovered.
fn hierarchy_check(p: &Params, opts: &VerifyOptions) -> Option<Vec<Check>> {
    let (lower, upper) = (RuleSpec::borda(p.i), RuleSpec::borda(p.j));
    let mut check = Check {
        source: "exhaustive".into(),
        statement: format!("{upper} >= {lower}"),
        seed: None,
        passed: false,
        oracle_checked: false,
        detail: None,
    };
    match check_inclusion(&upper, &lower, p.n, p.m, &opts.scan) {
        Ok(None) => check.passed = true,
        Ok(Some(cx)) => {
            check.detail = Some(format!(
                "counterexample {}",
                serde_json::to_string(&cx).expect("profiles serialize")
            ))
        }
        Err(Error::BudgetExceeded { .. }) => return None,
        Err(e) => check.detail = Some(e.to_string()),
    }
    Some(vec![check])
}

fn run_tuple(claim: ClaimId, p: &Params, opts: &VerifyOptions) -> TupleResult {
    use ClaimId::*;
    let pick = |found: Option<ClaimId>| {
        found
            .filter(|&c| check_params(c, p).is_ok())
            .map(|c| run_construction(c, p, opts))
    };
    let parts: Vec<Option<Vec<Check>>> = match claim {
        c if c.is_construction() => vec![Some(run_construction(c, p, opts))],
        CorApprovalJNotGeqI => vec![pick(approval_j_not_geq_i(p))],
        CorBordaINotGeqJ => vec![pick(borda_i_not_geq_j(p))],
        CorBordaJNotGeqI => vec![pick(borda_j_not_geq_i(p))],
        ThmApprovalIncomparable => vec![
            (p.n >= 2).then(|| run_construction(ApprovalINotGeqJ, p, opts)),
            pick(approval_j_not_geq_i(p)),
        ],
        ThmBordaIncomparable => vec![pick(borda_i_not_geq_j(p)), pick(borda_j_not_geq_i(p))],
        BordaN2Hierarchy => vec![
            hierarchy_check(p, opts),
            Some(run_construction(BordaINotGeqJEven, p, opts)),
        ],
        BordaN2FullIncomparable => vec![
            Some(run_construction(BordaFullNotGeqK, p, opts)),
            Some(run_construction(BordaINotGeqJEven, p, opts)),
        ],
        _ => unreachable!(),
    };
    let uncovered = parts.iter().any(Option::is_none);
    let checks: Vec<Check> = parts.into_iter().flatten().flatten().collect();
    let status = if checks.iter().any(|c| !c.passed) {
        Status::Fail
    } else if uncovered {
        Status::Uncovered
    } else {
        Status::Pass
    };
    TupleResult {
        params: *p,
        status,
        checks,
    }
}

/// Runs `claim` over every tuple of `grid` it applies to. Tuples a
/// construction's preconditions exclude are skipped; tuples inside a
/// composite claim's scope that no construction covers are reported as
/// uncovered.
pub fn verify_claim(claim: ClaimId, grid: &Grid, opts: &VerifyOptions) -> Result<ClaimSummary> {
    let tuples: Vec<Params> = grid
        .tuples()
        .into_iter()
        .filter(|p| in_scope(claim, p))
        .collect();
    let run = || -> Vec<TupleResult> {
        tuples
            .par_iter()
            .map(|p| run_tuple(claim, p, opts))
            .collect()
    };
    let results = match opts.threads {
        Some(1) => tuples.iter().map(|p| run_tuple(claim, p, opts)).collect(),
        threads => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidProfile(format!("thread pool: {e}")))?
            .install(run),
    };
    let tally_status = |s: Status| results.iter().filter(|r| r.status == s).count();
    Ok(ClaimSummary {
        claim,
        passed: tally_status(Status::Pass),
        failed: tally_status(Status::Fail),
        uncovered: tally_status(Status::Uncovered),
        tuples: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(case: &WitnessCase) -> Vec<Vec<u8>> {
        case.profile
            .ballots()
            .iter()
            .map(LinearOrder::ids)
            .collect()
    }

    #[test]
    fn claim_names_round_trip() {
        for &c in ClaimId::ALL {
            assert_eq!(c.name().parse::<ClaimId>().unwrap(), c);
        }
        assert!("NOPE".parse::<ClaimId>().is_err());
        assert_eq!(
            ClaimId::ALL.iter().filter(|c| c.is_construction()).count(),
            11
        );
    }

    #[test]
    fn approval_i_not_geq_j_small() {
        let case = build_witness(ClaimId::ApprovalINotGeqJ, Params::new(2, 3, 1, 2)).unwrap();
        assert_eq!(ids(&case), vec![vec![1, 0, 2], vec![1, 0, 2]]);
        assert_eq!(case.manip_rule, RuleSpec::approval(2));
        assert_eq!(case.robust_rule, RuleSpec::approval(1));
        assert!(verify_witness(&case).unwrap().passed);
    }

    #[test]
    fn borda_full_letters() {
        let case = build_witness(ClaimId::BordaFullNotGeqK, Params::new(2, 4, 2, 3)).unwrap();
        assert_eq!(ids(&case), vec![vec![2, 3, 0, 1], vec![3, 0, 1, 2]]);
        assert_eq!(case.manip_rule, RuleSpec::borda(2));
        assert_eq!(case.robust_rule, RuleSpec::borda(3));
        let v = verify_witness(&case).unwrap();
        assert!(v.passed);
        // C wins with 2k-1 points.
        assert_eq!(v.manip_scores.as_slice(), [1, 0, 2, 3]);
    }

    #[test]
    fn swapped_rules_fail() {
        let mut case = build_witness(ClaimId::ApprovalINotGeqJ, Params::new(2, 3, 1, 2)).unwrap();
        std::mem::swap(&mut case.manip_rule, &mut case.robust_rule);
        let v = verify_witness(&case).unwrap();
        assert!(!v.passed);
        assert!(v.robust_manipulation.is_some());
    }

    #[test]
    fn borda_even_small() {
        let case = build_witness(ClaimId::BordaINotGeqJEven, Params::new(2, 5, 1, 2)).unwrap();
        assert!(verify_witness(&case).unwrap().passed);
        assert!(oracle_confirms(&case, 8).unwrap());
    }

    #[test]
    fn approval_j_not_geq_1_odd() {
        let case = build_witness(ClaimId::ApprovalJNotGeq1, Params::new(3, 3, 1, 2)).unwrap();
        assert!(verify_witness(&case).unwrap().passed);
        assert!(oracle_confirms(&case, 8).unwrap());
    }

    #[test]
    fn preconditions_name_the_bound() {
        let err = build_witness(ClaimId::BordaJNotGeqIN4, Params::new(3, 4, 1, 2)).unwrap_err();
        assert_eq!(
            err,
            Error::Parameter {
                claim: "BORDA_J_NOT_GEQ_I_N4".into(),
                bound: "n = 4".into()
            }
        );
        assert!(build_witness(ClaimId::ApprovalINotGeqJ, Params::new(2, 3, 2, 2)).is_err());
        assert!(build_witness(ClaimId::ApprovalINotGeqJ, Params::new(2, 3, 1, 3)).is_err());
        assert!(build_witness(ClaimId::ThmApprovalIncomparable, Params::new(2, 3, 1, 2)).is_err());
    }

    #[test]
    fn grid_tuples() {
        let g = Grid::new(2..=2, 3..=4);
        let t: Vec<_> = g.tuples().iter().map(|p| (p.m, p.i, p.j)).collect();
        assert_eq!(t, vec![(3, 1, 2), (4, 1, 2), (4, 1, 3), (4, 2, 3)]);
    }

    #[test]
    fn free_block_orders_are_seeded() {
        let p = Params::new(4, 6, 3, 5);
        let a =
            build_witness_with(ClaimId::ApprovalJNotGeqISmallM, p, FreeOrder::Seeded(7)).unwrap();
        let b =
            build_witness_with(ClaimId::ApprovalJNotGeqISmallM, p, FreeOrder::Seeded(7)).unwrap();
        assert_eq!(a, b);
    }
}
