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

//! Single-voter manipulability of a scoring rule at a profile.
//!
//! The fast path builds one canonical misreport per voter, the normal-form
//! vote: candidates the voter likes better than the sincere winner `w` go on
//! top, highest-scoring (in the other voters' ballots) first; everyone else,
//! `w` included, goes below in *ascending* score order, so the strongest bad
//! candidate is ranked last. If any misreport helps the voter, this one does,
//! so a single winner computation per voter decides manipulability.
//!
//! [`brute_force_manipulation`] tries every ballot instead and serves as the
//! independent oracle for the fast path.

use serde::{Deserialize, Serialize};

use crate::ballots::{enumerate_orders_up_to, Candidate, LinearOrder, Profile};
use crate::error::Result;
use crate::scoring::{argmax_lowest, scoring_vector, tally, RuleSpec, ScoringVector};

/// A successful misreport by a single voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManipulationWitness {
    pub voter: usize,
    pub misreport: LinearOrder,
    pub sincere_winner: Candidate,
    pub new_winner: Candidate,
}

impl ManipulationWitness {
    /// Replays the misreport and checks both witness invariants against the
    /// voter's sincere ballot.
    pub fn certifies(&self, p: &Profile, v: &ScoringVector) -> bool {
        if self.voter >= p.n() || self.misreport.len() != p.m() {
            return false;
        }
        let sincere = p.ballot(self.voter);
        tally(p, v).winner() == self.sincere_winner
            && tally(&p.with_ballot(self.voter, self.misreport.clone()), v).winner()
                == self.new_winner
            && sincere.prefers(self.new_winner, self.sincere_winner)
    }
}

/// The good and bad candidates of a voter relative to the sincere winner,
/// each ordered by descending score among the other voters, ties by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodBadPartition {
    pub good: Vec<Candidate>,
    pub bad: Vec<Candidate>,
}

impl GoodBadPartition {
    fn new(ballot: &LinearOrder, w: Candidate, others: &[u64]) -> Self {
        let cut = ballot.position(w);
        let (good, bad) = ballot.candidates().split_at(cut);
        let mut good = good.to_vec();
        let mut bad = bad.to_vec();
        let key = |c: &Candidate| (std::cmp::Reverse(others[c.index()]), *c);
        good.sort_by_key(key);
        bad.sort_by_key(key);
        GoodBadPartition { good, bad }
    }

    /// `g_1 ≻ … ≻ g_q ≻ b_r ≻ … ≻ b_1`.
    pub fn normal_form(&self) -> LinearOrder {
        let ranking = self
            .good
            .iter()
            .chain(self.bad.iter().rev())
            .copied()
            .collect();
        LinearOrder::new(ranking).expect("partition covers every candidate once")
    }
}

fn others_scores(p: &Profile, v: &ScoringVector, full: &[u64], voter: usize) -> Vec<u64> {
    let mut others = full.to_vec();
    v.sub_ballot(p.ballot(voter), &mut others);
    others
}

fn winner_with(
    others: &[u64],
    v: &ScoringVector,
    ballot: &LinearOrder,
    scratch: &mut Vec<u64>,
) -> Candidate {
    scratch.clear();
    scratch.extend_from_slice(others);
    v.add_ballot(ballot, scratch);
    Candidate(argmax_lowest(scratch) as u8)
}

/// The voter's good/bad partition at `p` under `v`.
pub fn good_bad_partition(voter: usize, p: &Profile, v: &ScoringVector) -> GoodBadPartition {
    let full = tally(p, v);
    let others = others_scores(p, v, full.as_slice(), voter);
    GoodBadPartition::new(p.ballot(voter), full.winner(), &others)
}

pub fn normal_form_vote_with(voter: usize, p: &Profile, v: &ScoringVector) -> LinearOrder {
    good_bad_partition(voter, p, v).normal_form()
}

pub fn normal_form_vote(voter: usize, p: &Profile, rule: &RuleSpec) -> Result<LinearOrder> {
    let v = scoring_vector(rule, p.m())?;
    Ok(normal_form_vote_with(voter, p, &v))
}

fn check_voter(
    voter: usize,
    p: &Profile,
    v: &ScoringVector,
    full: &[u64],
    w: Candidate,
    scratch: &mut Vec<u64>,
) -> Option<ManipulationWitness> {
    let sincere = p.ballot(voter);
    if sincere.top() == w {
        return None;
    }
    let others = others_scores(p, v, full, voter);
    let misreport = GoodBadPartition::new(sincere, w, &others).normal_form();
    let new_winner = winner_with(&others, v, &misreport, scratch);
    sincere
        .prefers(new_winner, w)
        .then_some(ManipulationWitness {
            voter,
            misreport,
            sincere_winner: w,
            new_winner,
        })
}

pub fn manipulable_by_with(
    voter: usize,
    p: &Profile,
    v: &ScoringVector,
) -> Option<ManipulationWitness> {
    let full = tally(p, v);
    check_voter(voter, p, v, full.as_slice(), full.winner(), &mut Vec::new())
}

/// Witness iff `voter` can manipulate at `p`, using the normal-form vote.
pub fn manipulable_by(
    voter: usize,
    p: &Profile,
    rule: &RuleSpec,
) -> Result<Option<ManipulationWitness>> {
    let v = scoring_vector(rule, p.m())?;
    Ok(manipulable_by_with(voter, p, &v))
}

pub fn find_manipulation_with(p: &Profile, v: &ScoringVector) -> Option<ManipulationWitness> {
    let full = tally(p, v);
    let w = full.winner();
    let mut scratch = Vec::with_capacity(p.m());
    (0..p.n()).find_map(|voter| check_voter(voter, p, v, full.as_slice(), w, &mut scratch))
}

/// First manipulating voter in index order, if any.
pub fn find_manipulation(p: &Profile, rule: &RuleSpec) -> Result<Option<ManipulationWitness>> {
    let v = scoring_vector(rule, p.m())?;
    Ok(find_manipulation_with(p, &v))
}

/// Oracle for one voter: the first ballot in `orders` that helps `voter`.
pub fn brute_force_manipulable_by_with(
    voter: usize,
    p: &Profile,
    v: &ScoringVector,
    orders: &[LinearOrder],
) -> Option<ManipulationWitness> {
    let full = tally(p, v);
    brute_force_voter(
        voter,
        p,
        v,
        full.as_slice(),
        full.winner(),
        orders,
        &mut Vec::new(),
    )
}

fn brute_force_voter(
    voter: usize,
    p: &Profile,
    v: &ScoringVector,
    full: &[u64],
    w: Candidate,
    orders: &[LinearOrder],
    scratch: &mut Vec<u64>,
) -> Option<ManipulationWitness> {
    let sincere = p.ballot(voter);
    let others = others_scores(p, v, full, voter);
    orders.iter().find_map(|misreport| {
        let new_winner = winner_with(&others, v, misreport, scratch);
        sincere.prefers(new_winner, w).then(|| ManipulationWitness {
            voter,
            misreport: misreport.clone(),
            sincere_winner: w,
            new_winner,
        })
    })
}

/// Oracle: tries every ballot in `orders` for every voter, in order.
pub fn brute_force_manipulation_with(
    p: &Profile,
    v: &ScoringVector,
    orders: &[LinearOrder],
) -> Option<ManipulationWitness> {
    let full = tally(p, v);
    let w = full.winner();
    let mut scratch = Vec::with_capacity(p.m());
    (0..p.n())
        .find_map(|voter| brute_force_voter(voter, p, v, full.as_slice(), w, orders, &mut scratch))
}

/// Oracle over all `m!` misreports. `m` is bounded by `max_candidates`.
pub fn brute_force_manipulation(
    p: &Profile,
    rule: &RuleSpec,
    max_candidates: usize,
) -> Result<Option<ManipulationWitness>> {
    let v = scoring_vector(rule, p.m())?;
    let orders = enumerate_orders_up_to(p.m(), max_candidates)?;
    Ok(brute_force_manipulation_with(p, &v, &orders))
}
