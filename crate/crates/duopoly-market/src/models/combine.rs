//! Combination pipelines over one Filtering-based and one Discounting-based
//! model: filter the unfair ratings first and discount what remains, or
//! discount first, drop low-trust advisors outright, and filter the rest.

use serde::{Deserialize, Serialize};

use crate::ledger::{AccountId, RatingAggregate};

use super::discounting::discounted_reputation;
use super::filtering::filtered_reputation;
use super::HonestSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinerParams {
    /// Trust cutoff for Discount-then-Filter: advisors at or below it lose
    /// all their ratings before the filtering stage runs.
    pub epsilon: f64,
}

impl Default for CombinerParams {
    fn default() -> Self {
        CombinerParams { epsilon: 0.5 }
    }
}

/// Filter-then-Discount: aggregate the filter's survivors with Eq. 2 trust
/// weights. When the filter vouches for the buyer's own ratings (iCLUB local
/// knowledge) they join at full trust.
pub fn filter_then_discount(
    survivors: &HonestSet,
    tau: impl Fn(AccountId) -> f64,
    agg: impl Fn(AccountId) -> RatingAggregate,
    buyer_agg: RatingAggregate,
) -> f64 {
    let advisors = survivors.advisors.iter().map(|&a| (tau(a), agg(a)));
    if survivors.includes_buyer {
        discounted_reputation(advisors.chain(std::iter::once((1.0, buyer_agg))))
    } else {
        discounted_reputation(advisors)
    }
}

/// Advisors surviving the trust cut: `tau > epsilon`. The result is sorted so
/// it can serve as a filter universe.
pub fn apply_trust_cut(
    advisors: &[AccountId],
    tau: impl Fn(AccountId) -> f64,
    epsilon: f64,
) -> Vec<AccountId> {
    let mut kept: Vec<AccountId> = advisors
        .iter()
        .copied()
        .filter(|&a| tau(a) > epsilon)
        .collect();
    kept.sort_unstable();
    kept
}

/// Discount-then-Filter: cut advisors whose trust does not clear `epsilon`,
/// run the filtering model on the remaining ratings, then aggregate the
/// filter's survivors with Eq. 1.
pub fn discount_then_filter(
    advisors: &[AccountId],
    tau: impl Fn(AccountId) -> f64,
    epsilon: f64,
    filter: impl FnOnce(&[AccountId]) -> HonestSet,
    agg: impl Fn(AccountId) -> RatingAggregate,
    buyer_agg: RatingAggregate,
) -> f64 {
    let kept = apply_trust_cut(advisors, tau, epsilon);
    let survivors = filter(&kept);
    let aggs = survivors.advisors.iter().map(|&a| agg(a));
    if survivors.includes_buyer {
        filtered_reputation(aggs.chain(std::iter::once(buyer_agg)))
    } else {
        filtered_reputation(aggs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg_of(table: &[(u32, u32)]) -> impl Fn(AccountId) -> RatingAggregate + '_ {
        move |a: AccountId| {
            let (p, n) = table[a.0 as usize];
            RatingAggregate { p, n }
        }
    }

    fn pass_through(universe: &[AccountId]) -> HonestSet {
        HonestSet {
            advisors: universe.to_vec(),
            includes_buyer: false,
        }
    }

    #[test]
    fn filter_removing_everyone_yields_default() {
        let empty = HonestSet::default();
        let rep = filter_then_discount(&empty, |_| 1.0, |_| RatingAggregate { p: 9, n: 0 }, RatingAggregate::default());
        assert_eq!(rep, 0.5);
    }

    #[test]
    fn identity_filter_with_unit_trust_reduces_to_eq1() {
        let table = [(2, 0), (1, 1), (0, 3)];
        let all = HonestSet {
            advisors: vec![AccountId(0), AccountId(1), AccountId(2)],
            includes_buyer: false,
        };
        let rep = filter_then_discount(&all, |_| 1.0, agg_of(&table), RatingAggregate::default());
        let eq1 = crate::models::filtering::filtered_reputation(
            table.iter().map(|&(p, n)| RatingAggregate { p, n }),
        );
        assert!((rep - eq1).abs() < 1e-15);
    }

    #[test]
    fn identity_filter_is_discounting_alone() {
        let table = [(5, 1), (0, 4), (2, 2)];
        let taus = [0.9, 0.2, 0.6];
        let all = HonestSet {
            advisors: vec![AccountId(0), AccountId(1), AccountId(2)],
            includes_buyer: false,
        };
        let rep = filter_then_discount(
            &all,
            |a| taus[a.0 as usize],
            agg_of(&table),
            RatingAggregate::default(),
        );
        let direct = crate::models::discounting::discounted_reputation(
            table
                .iter()
                .zip(&taus)
                .map(|(&(p, n), &t)| (t, RatingAggregate { p, n })),
        );
        assert!((rep - direct).abs() < 1e-15);
    }

    #[test]
    fn low_trust_everywhere_drops_everyone() {
        let table = [(9, 0), (9, 0)];
        let advisors = [AccountId(0), AccountId(1)];
        let rep = discount_then_filter(
            &advisors,
            |_| 0.4,
            0.5,
            pass_through,
            agg_of(&table),
            RatingAggregate::default(),
        );
        assert_eq!(rep, 0.5);
    }

    #[test]
    fn trust_at_exactly_the_cutoff_is_dropped() {
        let advisors = [AccountId(0)];
        let kept = apply_trust_cut(&advisors, |_| 0.5, 0.5);
        assert!(kept.is_empty());
        let kept = apply_trust_cut(&advisors, |_| 0.500001, 0.5);
        assert_eq!(kept, advisors);
    }

    #[test]
    fn high_trust_with_lenient_filter_reduces_to_eq1() {
        let table = [(2, 0), (1, 1), (0, 3)];
        let advisors = [AccountId(0), AccountId(1), AccountId(2)];
        let rep = discount_then_filter(
            &advisors,
            |_| 0.6,
            0.5,
            pass_through,
            agg_of(&table),
            RatingAggregate::default(),
        );
        let eq1 = crate::models::filtering::filtered_reputation(
            table.iter().map(|&(p, n)| RatingAggregate { p, n }),
        );
        assert!((rep - eq1).abs() < 1e-15);
    }

    #[test]
    fn zero_cutoff_keeps_every_positive_trust_advisor() {
        let advisors = [AccountId(0), AccountId(1), AccountId(2)];
        let kept = apply_trust_cut(&advisors, |a| 0.01 + a.0 as f64 / 10.0, 0.0);
        assert_eq!(kept.len(), 3);
    }
}
