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

//! Manipulability of k-approval and k-Borda voting rules.
//!
//! The crate decides single-voter manipulability of scoring rules under
//! lexicographic tie-breaking, compares two rules by the sets of profiles at
//! which they are manipulable (the Pathak–Sönmez ordering), and builds
//! explicit counterexample profiles separating pairs of rules.
//!
//! ```
//! use psmanip::{find_manipulation, Profile, RuleSpec};
//!
//! let p = Profile::from_ids(&[[1, 0, 2], [1, 0, 2]]).unwrap();
//! let w = find_manipulation(&p, &RuleSpec::approval(2)).unwrap().unwrap();
//! assert_eq!(w.misreport.ids(), vec![1, 2, 0]);
//! assert!(find_manipulation(&p, &RuleSpec::approval(1)).unwrap().is_none());
//! ```

pub mod ballots;
pub mod cli;
pub mod compare;
pub mod error;
pub mod manipulation;
pub mod scoring;
pub mod witnesses;

pub use ballots::{anonymize, expand, AnonymousProfile, Candidate, LinearOrder, Profile};
pub use compare::{check_inclusion, compare_exhaustive, ComparisonReport, Relation, ScanOptions};
pub use error::{Error, Result};
pub use manipulation::{
    brute_force_manipulation, find_manipulation, manipulable_by, normal_form_vote,
    ManipulationWitness,
};
pub use scoring::{scoring_vector, tally, winner, Family, RuleSpec, ScoreTable, ScoringVector};
pub use witnesses::{build_witness, verify_claim, verify_witness, ClaimId, Params, WitnessCase};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/manipulation.md")]
    mod manipulation {}
    #[doc = include_str!("../../../book/src/comparison.md")]
    mod comparison {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
