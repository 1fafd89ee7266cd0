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

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong when building elections, parsing inputs or
/// scheduling an exhaustive scan.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("candidate count m={m} outside supported range 1..={max}")]
    CandidateCount { m: usize, max: usize },
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("rule parameter k={k} out of range 1..={max} for m={m}")]
    RuleOutOfRange { k: usize, m: usize, max: usize },
    #[error("invalid rule string {0:?} (expected approval:<k>, borda:<k> or borda:m-1)")]
    RuleSyntax(String),
    #[error("enumeration needs {count} profiles, budget is {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("profile count overflows for n={n}, m={m}")]
    CountOverflow { n: usize, m: usize },
    #[error("{claim}: parameter error: {bound}")]
    Parameter { claim: String, bound: String },
    #[error("{claim}: construction-reading failure: {detail}")]
    Construction { claim: String, detail: String },
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
