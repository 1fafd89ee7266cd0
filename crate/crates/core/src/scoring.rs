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

//! k-approval and k-Borda scoring rules with lexicographic tie-breaking.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::ballots::{Candidate, LinearOrder, Profile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Approval,
    Borda,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Approval => "approval",
            Family::Borda => "borda",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approval" => Ok(Family::Approval),
            "borda" => Ok(Family::Borda),
            _ => Err(Error::RuleSyntax(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule of one of the two families, e.g. `α_2` is
/// `RuleSpec::approval(2)` and `β_3` is `RuleSpec::borda(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleSpec {
    pub family: Family,
    pub k: usize,
}

impl RuleSpec {
    pub const fn approval(k: usize) -> Self {
        RuleSpec {
            family: Family::Approval,
            k,
        }
    }

    pub const fn borda(k: usize) -> Self {
        RuleSpec {
            family: Family::Borda,
            k,
        }
    }

    /// Checks `1 ≤ k ≤ m-1`. `k = m` would make approval constant.
    pub fn validate(&self, m: usize) -> Result<()> {
        let max = m.saturating_sub(1);
        if self.k == 0 || self.k > max {
            return Err(Error::RuleOutOfRange { k: self.k, m, max });
        }
        Ok(())
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.k)
    }
}

impl Serialize for RuleSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A rule as written on the command line, before it is resolved against a
/// candidate count. Accepts `approval:<k>`, `borda:<k>` and `borda:m-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleArg {
    pub family: Family,
    k: Option<usize>,
}

impl RuleArg {
    pub fn resolve(&self, m: usize) -> Result<RuleSpec> {
        let k = self.k.unwrap_or(m.saturating_sub(1));
        let rule = RuleSpec {
            family: self.family,
            k,
        };
        rule.validate(m)?;
        Ok(rule)
    }
}

impl FromStr for RuleArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syntax = || Error::RuleSyntax(s.to_string());
        let (family, k) = s.split_once(':').ok_or_else(syntax)?;
        let family: Family = family.trim().parse().map_err(|_| syntax())?;
        let k = k.trim();
        if k == "m-1" {
            if family != Family::Borda {
                return Err(syntax());
            }
            return Ok(RuleArg { family, k: None });
        }
        let k: usize = k.parse().map_err(|_| syntax())?;
        Ok(RuleArg { family, k: Some(k) })
    }
}

impl fmt::Display for RuleArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            Some(k) => write!(f, "{}:{k}", self.family),
            None => write!(f, "{}:m-1", self.family),
        }
    }
}

/// Points awarded per position, `points[0]` for the top of a ballot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoringVector {
    points: Vec<u64>,
}

impl ScoringVector {
    /// Arbitrary non-increasing vector. Not exposed: the public rules are the
    /// two families only.
    #[cfg(test)]
    pub(crate) fn from_points(points: Vec<u64>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] >= w[1]));
        ScoringVector { points }
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Points for zero-based `position`.
    pub fn at(&self, position: usize) -> u64 {
        self.points[position]
    }

    pub fn per_ballot_total(&self) -> u64 {
        self.points.iter().sum()
    }

    /// Adds `ballot`'s contribution into `scores`.
    pub fn add_ballot(&self, ballot: &LinearOrder, scores: &mut [u64]) {
        for (c, &pts) in ballot.candidates().iter().zip(&self.points) {
            scores[c.index()] += pts;
        }
    }

    pub fn sub_ballot(&self, ballot: &LinearOrder, scores: &mut [u64]) {
        for (c, &pts) in ballot.candidates().iter().zip(&self.points) {
            scores[c.index()] -= pts;
        }
    }
}

pub fn scoring_vector(rule: &RuleSpec, m: usize) -> Result<ScoringVector> {
    rule.validate(m)?;
    let k = rule.k as u64;
    let points = (1..=m as u64)
        .map(|pos| match rule.family {
            Family::Approval => u64::from(pos <= k),
            Family::Borda => (k + 1).saturating_sub(pos),
        })
        .collect();
    Ok(ScoringVector { points })
}

/// Total score of every candidate, indexed by candidate id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreTable(Vec<u64>);

impl ScoreTable {
    pub fn from_scores(scores: Vec<u64>) -> Self {
        ScoreTable(scores)
    }

    pub fn get(&self, c: Candidate) -> u64 {
        self.0[c.index()]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Lowest id among the top scorers.
    pub fn winner(&self) -> Candidate {
        Candidate(argmax_lowest(&self.0) as u8)
    }
}

impl Serialize for ScoreTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (c, s) in self.0.iter().enumerate() {
            map.serialize_entry(&c.to_string(), s)?;
        }
        map.end()
    }
}

/// Index of the maximum, first index on ties.
pub(crate) fn argmax_lowest(scores: &[u64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

pub fn tally(p: &Profile, v: &ScoringVector) -> ScoreTable {
    assert_eq!(p.m(), v.m(), "scoring vector length differs from m");
    let mut scores = vec![0; p.m()];
    for b in p.ballots() {
        v.add_ballot(b, &mut scores);
    }
    ScoreTable(scores)
}

pub fn winner(p: &Profile, rule: &RuleSpec) -> Result<Candidate> {
    let v = scoring_vector(rule, p.m())?;
    Ok(tally(p, &v).winner())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[&[u8]]) -> Profile {
        Profile::from_ids(rows).unwrap()
    }

    #[test]
    fn vectors() {
        let v = |r: RuleSpec, m| scoring_vector(&r, m).unwrap().points().to_vec();
        assert_eq!(v(RuleSpec::approval(2), 4), [1, 1, 0, 0]);
        assert_eq!(v(RuleSpec::borda(2), 4), [2, 1, 0, 0]);
        assert_eq!(v(RuleSpec::borda(3), 4), [3, 2, 1, 0]);
        assert_eq!(v(RuleSpec::approval(1), 3), v(RuleSpec::borda(1), 3));
    }

    #[test]
    fn k_out_of_range() {
        assert_eq!(
            scoring_vector(&RuleSpec::approval(4), 4),
            Err(Error::RuleOutOfRange { k: 4, m: 4, max: 3 })
        );
        assert!(scoring_vector(&RuleSpec::borda(0), 4).is_err());
        assert!(scoring_vector(&RuleSpec::borda(1), 1).is_err());
    }

    #[test]
    fn tally_examples() {
        let v = scoring_vector(&RuleSpec::borda(2), 3).unwrap();
        assert_eq!(
            tally(&p(&[&[0, 1, 2], &[1, 0, 2]]), &v).as_slice(),
            [3, 3, 0]
        );
        let v = scoring_vector(&RuleSpec::approval(1), 3).unwrap();
        assert_eq!(tally(&p(&[&[0, 1, 2]]), &v).as_slice(), [1, 0, 0]);
    }

    #[test]
    fn unanimous_profile_is_linear() {
        let v = scoring_vector(&RuleSpec::borda(3), 5).unwrap();
        let b: &[u8] = &[3, 1, 4, 0, 2];
        let t = tally(&p(&[b, b, b, b]), &v);
        for (pos, &c) in b.iter().enumerate() {
            assert_eq!(t.get(Candidate(c)), 4 * v.at(pos));
        }
    }

    #[test]
    fn winner_examples() {
        let two = p(&[&[0, 1, 2], &[1, 0, 2]]);
        assert_eq!(winner(&two, &RuleSpec::borda(2)).unwrap(), Candidate(0));
        let three = p(&[&[0, 1, 2], &[1, 0, 2], &[1, 2, 0]]);
        assert_eq!(
            winner(&three, &RuleSpec::approval(1)).unwrap(),
            Candidate(1)
        );
        // A_1 -> 0, B_1 -> 1, C_1 -> 2; both voters B_1 A_1 C_1.
        let laij = p(&[&[1, 0, 2], &[1, 0, 2]]);
        assert_eq!(winner(&laij, &RuleSpec::approval(2)).unwrap(), Candidate(0));
    }

    #[test]
    fn constant_shift_keeps_winner() {
        let profiles = [
            p(&[&[0, 1, 2, 3], &[3, 2, 1, 0], &[2, 3, 0, 1]]),
            p(&[&[1, 0, 2, 3], &[2, 3, 1, 0]]),
        ];
        for prof in &profiles {
            for rule in [
                RuleSpec::approval(2),
                RuleSpec::borda(2),
                RuleSpec::borda(3),
            ] {
                let v = scoring_vector(&rule, 4).unwrap();
                let shifted =
                    ScoringVector::from_points(v.points().iter().map(|x| x + 7).collect());
                assert_eq!(tally(prof, &v).winner(), tally(prof, &shifted).winner());
            }
        }
    }

    #[test]
    fn rule_strings() {
        let arg: RuleArg = "approval:2".parse().unwrap();
        assert_eq!(arg.resolve(4).unwrap(), RuleSpec::approval(2));
        let arg: RuleArg = "borda:m-1".parse().unwrap();
        assert_eq!(arg.resolve(5).unwrap(), RuleSpec::borda(4));
        assert_eq!(arg.to_string(), "borda:m-1");
        assert!("approval:m-1".parse::<RuleArg>().is_err());
        assert!("plurality:1".parse::<RuleArg>().is_err());
        assert!("borda:x".parse::<RuleArg>().is_err());
        assert!("borda".parse::<RuleArg>().is_err());
        let arg: RuleArg = "approval:3".parse().unwrap();
        assert!(arg.resolve(3).is_err());
        assert_eq!(RuleSpec::borda(3).to_string(), "borda:3");
    }

    #[test]
    fn score_table_json() {
        let t = ScoreTable::from_scores(vec![2, 2, 0]);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"0":2,"1":2,"2":0}"#);
        assert_eq!(t.winner(), Candidate(0));
    }
}
