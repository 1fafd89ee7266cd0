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

//! Candidates, ballots and profiles, plus exhaustive enumeration of ballots
//! and anonymous profiles.
//!
//! A candidate's numeric id is also its tie-breaking priority: in any tie the
//! lowest id wins. All enumerations are lexicographic and deterministic, and
//! the profile iterators can be split by the index of the first ballot so
//! that parallel workers cover disjoint, ordered slices of the space.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest candidate count the enumerators accept unless told otherwise.
/// 8! = 40320 ballots.
pub const DEFAULT_MAX_CANDIDATES: usize = 8;

/// Hard limit imposed by the `u8` candidate representation.
pub const MAX_REPRESENTABLE_CANDIDATES: usize = u8::MAX as usize + 1;

/// A candidate. The id doubles as tie-breaking rank (0 beats everyone).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Candidate(pub u8);

impl Candidate {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A strict ranking of all candidates, most preferred first.
///
/// The derived `Ord` compares rankings lexicographically, which is the
/// canonical order used by every enumeration in this crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct LinearOrder(Vec<Candidate>);

impl LinearOrder {
    /// Builds a ballot, checking that it is a permutation of `0..len`.
    pub fn new(ranking: Vec<Candidate>) -> Result<Self> {
        let m = ranking.len();
        if m == 0 {
            return Err(Error::InvalidBallot("empty ballot".into()));
        }
        if m > MAX_REPRESENTABLE_CANDIDATES {
            return Err(Error::InvalidBallot(format!("{m} candidates is too many")));
        }
        let mut seen = vec![false; m];
        for c in &ranking {
            let slot = seen.get_mut(c.index()).ok_or_else(|| {
                Error::InvalidBallot(format!("candidate {c} out of range for m={m}"))
            })?;
            if *slot {
                return Err(Error::InvalidBallot(format!("candidate {c} ranked twice")));
            }
            *slot = true;
        }
        Ok(LinearOrder(ranking))
    }

    pub fn from_ids(ids: &[u8]) -> Result<Self> {
        Self::new(ids.iter().copied().map(Candidate).collect())
    }

    /// The ballot `0 ≻ 1 ≻ … ≻ m-1`.
    pub fn identity(m: usize) -> Self {
        LinearOrder((0..m).map(|c| Candidate(c as u8)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.0
    }

    pub fn top(&self) -> Candidate {
        self.0[0]
    }

    /// Zero-based position of `c` in the ranking.
    pub fn position(&self, c: Candidate) -> usize {
        self.0
            .iter()
            .position(|&x| x == c)
            .expect("candidate belongs to the ballot")
    }

    /// True iff `a` is ranked strictly above `b`.
    pub fn prefers(&self, a: Candidate, b: Candidate) -> bool {
        self.position(a) < self.position(b)
    }

    pub fn ids(&self) -> Vec<u8> {
        self.0.iter().map(|c| c.0).collect()
    }
}

impl TryFrom<Vec<u8>> for LinearOrder {
    type Error = Error;

    fn try_from(ids: Vec<u8>) -> Result<Self> {
        LinearOrder::from_ids(&ids)
    }
}

impl From<LinearOrder> for Vec<u8> {
    fn from(order: LinearOrder) -> Self {
        order.ids()
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (pos, c) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An ordered tuple of `n ≥ 1` ballots over the same `m` candidates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct Profile {
    m: usize,
    ballots: Vec<LinearOrder>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    m: usize,
    ballots: Vec<LinearOrder>,
}

impl TryFrom<ProfileDoc> for Profile {
    type Error = Error;

    fn try_from(doc: ProfileDoc) -> Result<Self> {
        Profile::new(doc.m, doc.ballots)
    }
}

impl From<Profile> for ProfileDoc {
    fn from(p: Profile) -> Self {
        ProfileDoc {
            m: p.m,
            ballots: p.ballots,
        }
    }
}

impl Profile {
    pub fn new(m: usize, ballots: Vec<LinearOrder>) -> Result<Self> {
        if ballots.is_empty() {
            return Err(Error::InvalidProfile(
                "a profile needs at least one ballot".into(),
            ));
        }
        if let Some((i, b)) = ballots.iter().enumerate().find(|(_, b)| b.len() != m) {
            return Err(Error::InvalidProfile(format!(
                "ballot {i} ranks {} candidates, expected m={m}",
                b.len()
            )));
        }
        Ok(Profile { m, ballots })
    }

    /// Builds a profile from raw id rows; `m` is taken from the first row.
    pub fn from_ids<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let ballots = rows
            .iter()
            .map(|r| LinearOrder::from_ids(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let m = ballots.first().map_or(0, LinearOrder::len);
        Profile::new(m, ballots)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.ballots.len()
    }

    pub fn ballots(&self) -> &[LinearOrder] {
        &self.ballots
    }

    pub fn ballot(&self, voter: usize) -> &LinearOrder {
        &self.ballots[voter]
    }

    /// The profile `(P'_i, P_-i)`.
    pub fn with_ballot(&self, voter: usize, ballot: LinearOrder) -> Profile {
        assert_eq!(ballot.len(), self.m, "replacement ballot has wrong length");
        let mut ballots = self.ballots.clone();
        ballots[voter] = ballot;
        Profile { m: self.m, ballots }
    }

    /// Ballots of every voter except `voter` (`P_-i`).
    pub fn others(&self, voter: usize) -> impl Iterator<Item = &LinearOrder> {
        self.ballots
            .iter()
            .enumerate()
            .filter(move |&(v, _)| v != voter)
            .map(|(_, b)| b)
    }
}

/// A multiset of ballots: the sufficient statistic of a profile for any
/// anonymous rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AnonymousDoc", into = "AnonymousDoc")]
pub struct AnonymousProfile {
    m: usize,
    counts: BTreeMap<LinearOrder, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnonymousDoc {
    m: usize,
    counts: Vec<CountEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountEntry {
    ballot: LinearOrder,
    n: usize,
}

impl TryFrom<AnonymousDoc> for AnonymousProfile {
    type Error = Error;

    fn try_from(doc: AnonymousDoc) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for entry in doc.counts {
            if entry.ballot.len() != doc.m {
                return Err(Error::InvalidProfile(format!(
                    "ballot {} does not rank m={} candidates",
                    entry.ballot, doc.m
                )));
            }
            if entry.n == 0 {
                return Err(Error::InvalidProfile(format!(
                    "ballot {} has multiplicity zero",
                    entry.ballot
                )));
            }
            *counts.entry(entry.ballot).or_insert(0) += entry.n;
        }
        if counts.is_empty() {
            return Err(Error::InvalidProfile(
                "a profile needs at least one ballot".into(),
            ));
        }
        Ok(AnonymousProfile { m: doc.m, counts })
    }
}

impl From<AnonymousProfile> for AnonymousDoc {
    fn from(a: AnonymousProfile) -> Self {
        AnonymousDoc {
            m: a.m,
            counts: a
                .counts
                .into_iter()
                .map(|(ballot, n)| CountEntry { ballot, n })
                .collect(),
        }
    }
}

impl AnonymousProfile {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.counts.values().sum()
    }

    /// Distinct ballots with their multiplicities, in canonical order.
    pub fn counts(&self) -> impl Iterator<Item = (&LinearOrder, usize)> {
        self.counts.iter().map(|(b, &n)| (b, n))
    }

    /// Builds the multiset from indices into `orders` (typically the output
    /// of [`enumerate_orders`]).
    pub fn from_indices(m: usize, orders: &[LinearOrder], indices: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &ix in indices {
            *counts.entry(orders[ix].clone()).or_insert(0) += 1;
        }
        AnonymousProfile { m, counts }
    }
}

/// Collapses a profile to ballot multiplicities.
pub fn anonymize(p: &Profile) -> AnonymousProfile {
    let mut counts = BTreeMap::new();
    for b in p.ballots() {
        *counts.entry(b.clone()).or_insert(0) += 1;
    }
    AnonymousProfile { m: p.m(), counts }
}

/// Expands a multiset into a profile, ballots in canonical order.
pub fn expand(a: &AnonymousProfile) -> Profile {
    let ballots = a
        .counts
        .iter()
        .flat_map(|(b, &n)| std::iter::repeat_n(b.clone(), n))
        .collect();
    Profile { m: a.m, ballots }
}

fn check_candidate_count(m: usize, max: usize) -> Result<()> {
    let max = max.min(MAX_REPRESENTABLE_CANDIDATES);
    if m == 0 || m > max {
        return Err(Error::CandidateCount { m, max });
    }
    Ok(())
}

/// All `m!` ballots in lexicographic order, with the default ceiling.
pub fn enumerate_orders(m: usize) -> Result<Vec<LinearOrder>> {
    enumerate_orders_up_to(m, DEFAULT_MAX_CANDIDATES)
}

/// All `m!` ballots in lexicographic order, refusing `m > max`.
pub fn enumerate_orders_up_to(m: usize, max: usize) -> Result<Vec<LinearOrder>> {
    check_candidate_count(m, max)?;
    let mut current: Vec<u8> = (0..m as u8).collect();
    let mut out = Vec::with_capacity((1..=m).product());
    loop {
        out.push(LinearOrder(
            current.iter().copied().map(Candidate).collect(),
        ));
        if !next_permutation(&mut current) {
            return Ok(out);
        }
    }
}

fn next_permutation(xs: &mut [u8]) -> bool {
    let Some(pivot) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let successor = xs
        .iter()
        .rposition(|&x| x > xs[pivot])
        .expect("a larger element exists right of the pivot");
    xs.swap(pivot, successor);
    xs[pivot + 1..].reverse();
    true
}

pub fn factorial(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, x| acc.checked_mul(x))
}

/// Binomial coefficient `C(n, k)` in `u128`, or `None` on overflow.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for step in 0..k {
        // acc * (n - step) is divisible by (step + 1) at every step.
        acc = acc.checked_mul(n - step)? / (step + 1);
    }
    Some(acc)
}

/// Number of anonymous profiles: `C(m! + n - 1, n)`.
pub fn anonymous_profile_count(n: usize, m: usize) -> Result<u128> {
    factorial(m)
        .and_then(|ballots| binomial(ballots + n as u128 - 1, n as u128))
        .ok_or(Error::CountOverflow { n, m })
}

/// Number of ordered profiles: `(m!)^n`.
pub fn ordered_profile_count(n: usize, m: usize) -> Result<u128> {
    factorial(m)
        .and_then(|ballots| ballots.checked_pow(n as u32))
        .ok_or(Error::CountOverflow { n, m })
}

/// Non-decreasing index sequences of length `n` over `0..base`, i.e.
/// multisets, in lexicographic order.
///
/// [`Multisets::with_first`] restricts the stream to sequences starting with
/// a given index, which is how scans are partitioned.
#[derive(Debug, Clone)]
pub struct Multisets {
    base: usize,
    current: Vec<usize>,
    frozen: usize,
    done: bool,
}

impl Multisets {
    pub fn new(n: usize, base: usize) -> Self {
        Multisets {
            base,
            current: vec![0; n],
            frozen: 0,
            done: n == 0 || base == 0,
        }
    }

    pub fn with_first(n: usize, base: usize, first: usize) -> Self {
        Multisets {
            base,
            current: vec![first; n],
            frozen: 1,
            done: n == 0 || first >= base,
        }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        match self.current[self.frozen..]
            .iter()
            .rposition(|&x| x + 1 < self.base)
        {
            Some(offset) => {
                let p = self.frozen + offset;
                let v = self.current[p] + 1;
                self.current[p..].iter_mut().for_each(|x| *x = v);
            }
            None => self.done = true,
        }
        Some(item)
    }
}

/// All index tuples of length `n` over `0..base` (ordered profiles), in
/// lexicographic order; partitionable like [`Multisets`].
#[derive(Debug, Clone)]
pub struct Tuples {
    base: usize,
    current: Vec<usize>,
    frozen: usize,
    done: bool,
}

impl Tuples {
    pub fn new(n: usize, base: usize) -> Self {
        Tuples {
            base,
            current: vec![0; n],
            frozen: 0,
            done: n == 0 || base == 0,
        }
    }

    pub fn with_first(n: usize, base: usize, first: usize) -> Self {
        let mut current = vec![0; n];
        if let Some(head) = current.first_mut() {
            *head = first;
        }
        Tuples {
            base,
            current,
            frozen: 1,
            done: n == 0 || first >= base,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        match self.current[self.frozen..]
            .iter()
            .rposition(|&x| x + 1 < self.base)
        {
            Some(offset) => {
                let p = self.frozen + offset;
                self.current[p] += 1;
                self.current[p + 1..].iter_mut().for_each(|x| *x = 0);
            }
            None => self.done = true,
        }
        Some(item)
    }
}

/// Every anonymous profile with `n` voters and `m` candidates, each exactly
/// once, in canonical order.
pub fn enumerate_anonymous_profiles(
    n: usize,
    m: usize,
) -> Result<impl Iterator<Item = AnonymousProfile>> {
    if n == 0 {
        return Err(Error::InvalidProfile("n must be at least 1".into()));
    }
    let orders = enumerate_orders(m)?;
    anonymous_profile_count(n, m)?;
    let base = orders.len();
    Ok(Multisets::new(n, base).map(move |ix| AnonymousProfile::from_indices(m, &orders, &ix)))
}
