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

use proptest::prelude::*;
use psmanip::ballots::{anonymize, enumerate_orders, expand, Profile};
use psmanip::compare::{compare_exhaustive, ScanOptions};
use psmanip::manipulation::{brute_force_manipulation_with, find_manipulation_with};
use psmanip::scoring::{scoring_vector, tally, RuleSpec};
use psmanip::LinearOrder;

fn ballot(m: usize) -> impl Strategy<Value = LinearOrder> {
    Just((0..m as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|ids| LinearOrder::from_ids(&ids).unwrap())
}

fn profile(
    m: std::ops::RangeInclusive<usize>,
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Profile> {
    (m, n).prop_flat_map(|(m, n)| {
        proptest::collection::vec(ballot(m), n).prop_map(move |b| Profile::new(m, b).unwrap())
    })
}

fn rule(m: usize) -> impl Strategy<Value = RuleSpec> {
    (any::<bool>(), 1..m).prop_map(|(borda, k)| {
        if borda {
            RuleSpec::borda(k)
        } else {
            RuleSpec::approval(k)
        }
    })
}

fn profile_and_rule(
    m: std::ops::RangeInclusive<usize>,
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Profile, RuleSpec)> {
    profile(m, n).prop_flat_map(|p| {
        let m = p.m();
        (Just(p), rule(m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normal_form_agrees_with_brute_force((p, r) in profile_and_rule(3..=5, 1..=4)) {
        let v = scoring_vector(&r, p.m()).unwrap();
        let orders = enumerate_orders(p.m()).unwrap();
        prop_assert_eq!(
            find_manipulation_with(&p, &v).is_some(),
            brute_force_manipulation_with(&p, &v, &orders).is_some()
        );
    }

    #[test]
    fn witnesses_certify_themselves((p, r) in profile_and_rule(3..=8, 1..=7)) {
        let v = scoring_vector(&r, p.m()).unwrap();
        if let Some(w) = find_manipulation_with(&p, &v) {
            prop_assert!(w.certifies(&p, &v));
            prop_assert!(p.ballot(w.voter).prefers(w.new_winner, w.sincere_winner));
        }
    }

    #[test]
    fn voter_order_is_irrelevant((p, r) in profile_and_rule(3..=7, 1..=6), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut ballots = p.ballots().to_vec();
        ballots.shuffle(&mut rng);
        let q = Profile::new(p.m(), ballots).unwrap();
        let v = scoring_vector(&r, p.m()).unwrap();
        prop_assert_eq!(tally(&p, &v), tally(&q, &v));
        prop_assert_eq!(find_manipulation_with(&p, &v).is_some(), find_manipulation_with(&q, &v).is_some());
        prop_assert_eq!(anonymize(&p), anonymize(&q));
        prop_assert_eq!(tally(&expand(&anonymize(&p)), &v), tally(&p, &v));
    }

    #[test]
    fn scores_are_conserved((p, r) in profile_and_rule(2..=8, 1..=9)) {
        let v = scoring_vector(&r, p.m()).unwrap();
        prop_assert_eq!(tally(&p, &v).total(), p.n() as u64 * v.per_ballot_total());
    }

    #[test]
    fn winner_is_lowest_top_scorer((p, r) in profile_and_rule(2..=8, 1..=9)) {
        let v = scoring_vector(&r, p.m()).unwrap();
        let scores = tally(&p, &v);
        let s = scores.as_slice();
        let w = scores.winner().index();
        prop_assert!(s.iter().all(|&x| x <= s[w]));
        prop_assert!(s[..w].iter().all(|&x| x < s[w]));
    }

    #[test]
    fn borda_shift_is_bounded(p in profile(3..=8, 1..=9), k in 1usize..6) {
        let m = p.m();
        prop_assume!(k + 1 < m);
        let lo = tally(&p, &scoring_vector(&RuleSpec::borda(k), m).unwrap());
        let hi = tally(&p, &scoring_vector(&RuleSpec::borda(k + 1), m).unwrap());
        for (a, b) in lo.as_slice().iter().zip(hi.as_slice()) {
            prop_assert!(b >= a && b - a <= p.n() as u64);
        }
    }

    #[test]
    fn profile_json_round_trips(p in profile(1..=6, 1..=5)) {
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Profile>(&text).unwrap(), p.clone());
        let a = anonymize(&p);
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<psmanip::AnonymousProfile>(&text).unwrap(), a);
    }
}

#[test]
fn compare_is_mirror_consistent_and_transitive() {
    let opts = ScanOptions::sequential();
    for (n, m) in [(2, 3), (2, 4), (3, 3), (2, 5)] {
        let rules: Vec<RuleSpec> = (1..m)
            .map(RuleSpec::approval)
            .chain((1..m).map(RuleSpec::borda))
            .collect();
        let mut geq = vec![vec![false; rules.len()]; rules.len()];
        for (x, f) in rules.iter().enumerate() {
            for (y, g) in rules.iter().enumerate() {
                let r = compare_exhaustive(f, g, n, m, &opts).unwrap();
                let back = compare_exhaustive(g, f, n, m, &opts).unwrap();
                assert_eq!(
                    r.relation.transpose(),
                    back.relation,
                    "{f} vs {g} at ({n}, {m})"
                );
                geq[x][y] = r.relation.f_geq_g();
            }
        }
        for a in 0..rules.len() {
            assert!(geq[a][a]);
            for b in 0..rules.len() {
                for c in 0..rules.len() {
                    if geq[a][b] && geq[b][c] {
                        assert!(
                            geq[a][c],
                            "{} >= {} >= {} at ({n}, {m})",
                            rules[a], rules[b], rules[c]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let (f, g) = (RuleSpec::borda(3), RuleSpec::borda(1));
    let base = compare_exhaustive(&f, &g, 3, 4, &ScanOptions::sequential()).unwrap();
    for threads in [2, 3, 7] {
        let opts = ScanOptions {
            threads: Some(threads),
            ..ScanOptions::default()
        };
        let r = compare_exhaustive(&f, &g, 3, 4, &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            serde_json::to_string(&base).unwrap()
        );
    }
}
