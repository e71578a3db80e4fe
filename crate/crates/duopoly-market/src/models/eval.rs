//! Day-scoped defense evaluation over a ledger snapshot.
//!
//! One `Evaluator` is built per simulated day (after the previous day's
//! ratings are appended) and serves every buyer's reputation queries for that
//! day. Caches hold whatever is buyer-independent: the BRS survivor set per
//! seller, per-seller clusterings, public trust and rating-window profiles per
//! account.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::ledger::{AccountId, RatingAggregate, RatingsLedger, SellerId};

use super::combine::{discount_then_filter, filter_then_discount};
use super::discounting::{
    blend_trust, personalized_public_trust, private_trust_from_profiles, travos_trust,
};
use super::filtering::{brs_filter, filtered_reputation, iclub_filter, ClusterCtx};
use super::{Defense, HonestSet, ModelParams, SingleModel};

type BucketProfiles = Vec<Vec<((u16, u16), (u32, u32))>>;

pub struct Evaluator<'a> {
    ledger: &'a RatingsLedger,
    defense: Defense,
    params: &'a ModelParams,
    cluster: ClusterCtx<'a>,
    brs_memo: RefCell<HashMap<SellerId, Rc<HonestSet>>>,
    public_memo: RefCell<Option<Rc<Vec<f64>>>>,
    profile_memo: RefCell<Option<Rc<BucketProfiles>>>,
    personalized_memo: RefCell<HashMap<(AccountId, AccountId), f64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ledger: &'a RatingsLedger, defense: Defense, params: &'a ModelParams) -> Self {
        Evaluator {
            ledger,
            defense,
            params,
            cluster: ClusterCtx::new(ledger, params.iclub.cluster_eps, None),
            brs_memo: RefCell::new(HashMap::new()),
            public_memo: RefCell::new(None),
            profile_memo: RefCell::new(None),
            personalized_memo: RefCell::new(HashMap::new()),
        }
    }

    /// The seller's reputation from this buyer's perspective under the
    /// configured defense.
    pub fn reputation(&self, buyer: AccountId, seller: SellerId) -> f64 {
        match self.defense {
            Defense::Single(SingleModel::Brs) => {
                let set = self.brs_set(seller);
                filtered_reputation(
                    set.advisors
                        .iter()
                        .filter(|&&a| a != buyer)
                        .map(|&a| self.ledger.aggregate(a, seller)),
                )
            }
            Defense::Single(SingleModel::Iclub) => {
                let set = iclub_filter(&self.cluster, buyer, seller, &self.params.iclub);
                let aggs = set.advisors.iter().map(|&a| self.ledger.aggregate(a, seller));
                if set.includes_buyer {
                    filtered_reputation(
                        aggs.chain(std::iter::once(self.ledger.aggregate(buyer, seller))),
                    )
                } else {
                    filtered_reputation(aggs)
                }
            }
            Defense::Single(discount) => {
                let advisors = self.advisors(buyer, seller);
                super::discounting::discounted_reputation(advisors.iter().map(|&a| {
                    (
                        self.discount_tau(discount, buyer, a, seller),
                        self.ledger.aggregate(a, seller),
                    )
                }))
            }
            Defense::FilterThenDiscount { filter, discount } => {
                let set = self.filter_set(filter, buyer, seller, None);
                filter_then_discount(
                    &set,
                    |a| self.discount_tau(discount, buyer, a, seller),
                    |a| self.ledger.aggregate(a, seller),
                    self.ledger.aggregate(buyer, seller),
                )
            }
            Defense::DiscountThenFilter { discount, filter } => {
                let advisors = self.advisors(buyer, seller);
                discount_then_filter(
                    &advisors,
                    |a| self.discount_tau(discount, buyer, a, seller),
                    self.params.combiner.epsilon,
                    |kept| self.filter_set(filter, buyer, seller, Some(kept)),
                    |a| self.ledger.aggregate(a, seller),
                    self.ledger.aggregate(buyer, seller),
                )
            }
        }
    }

    /// Everyone who rated the seller except the asking buyer.
    fn advisors(&self, buyer: AccountId, seller: SellerId) -> Vec<AccountId> {
        self.ledger
            .raters(seller)
            .iter()
            .copied()
            .filter(|&a| a != buyer)
            .collect()
    }

    fn brs_set(&self, seller: SellerId) -> Rc<HonestSet> {
        if let Some(set) = self.brs_memo.borrow().get(&seller) {
            return Rc::clone(set);
        }
        let set = Rc::new(brs_filter(self.ledger, seller, self.params.brs.q, None));
        self.brs_memo.borrow_mut().insert(seller, Rc::clone(&set));
        set
    }

    fn filter_set(
        &self,
        filter: SingleModel,
        buyer: AccountId,
        seller: SellerId,
        universe: Option<&[AccountId]>,
    ) -> HonestSet {
        match (filter, universe) {
            (SingleModel::Brs, None) => {
                let cached = self.brs_set(seller);
                let advisors = cached
                    .advisors
                    .iter()
                    .copied()
                    .filter(|&a| a != buyer)
                    .collect();
                HonestSet { advisors, includes_buyer: false }
            }
            (SingleModel::Brs, Some(universe)) => {
                let mut set = brs_filter(self.ledger, seller, self.params.brs.q, Some(universe));
                set.advisors.retain(|&a| a != buyer);
                set
            }
            (SingleModel::Iclub, None) => {
                iclub_filter(&self.cluster, buyer, seller, &self.params.iclub)
            }
            (SingleModel::Iclub, Some(universe)) => {
                let ctx =
                    ClusterCtx::for_buyer(self.ledger, self.params.iclub.cluster_eps, universe, buyer);
                iclub_filter(&ctx, buyer, seller, &self.params.iclub)
            }
            (m, _) => unreachable!("{m:?} is not a filtering model"),
        }
    }

    fn discount_tau(
        &self,
        model: SingleModel,
        buyer: AccountId,
        advisor: AccountId,
        target: SellerId,
    ) -> f64 {
        match model {
            SingleModel::Travos => {
                travos_trust(self.ledger, buyer, advisor, target, &self.params.travos).tau
            }
            SingleModel::Personalized => self.personalized_tau(buyer, advisor),
            m => unreachable!("{m:?} is not a discounting model"),
        }
    }

    /// Personalized trust is target-independent, so one value per
    /// (buyer, advisor) pair serves both duopoly evaluations.
    fn personalized_tau(&self, buyer: AccountId, advisor: AccountId) -> f64 {
        if let Some(&tau) = self.personalized_memo.borrow().get(&(buyer, advisor)) {
            return tau;
        }
        let publics = self.public_trusts();
        let profiles = self.bucket_profiles();
        let private = private_trust_from_profiles(
            &profiles[buyer.0 as usize],
            &profiles[advisor.0 as usize],
            &self.params.personalized,
        );
        let tau = blend_trust(&private, publics[advisor.0 as usize], &self.params.personalized).tau;
        self.personalized_memo.borrow_mut().insert((buyer, advisor), tau);
        tau
    }

    fn public_trusts(&self) -> Rc<Vec<f64>> {
        if let Some(v) = self.public_memo.borrow().as_ref() {
            return Rc::clone(v);
        }
        let v = Rc::new(
            (0..self.ledger.accounts().len())
                .map(|a| personalized_public_trust(self.ledger, AccountId(a as u32)))
                .collect::<Vec<f64>>(),
        );
        *self.public_memo.borrow_mut() = Some(Rc::clone(&v));
        v
    }

    fn bucket_profiles(&self) -> Rc<BucketProfiles> {
        if let Some(v) = self.profile_memo.borrow().as_ref() {
            return Rc::clone(v);
        }
        let window = self.params.personalized.window_days;
        let mut profiles: BucketProfiles = vec![Vec::new(); self.ledger.accounts().len()];
        for (idx, profile) in profiles.iter_mut().enumerate() {
            let account = AccountId(idx as u32);
            for &(s, day, v) in self.ledger.account_history(account) {
                let key = (s.0, (day - 1) / window);
                let slot = match profile.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, c)) => c,
                    None => {
                        profile.push((key, (0, 0)));
                        &mut profile.last_mut().unwrap().1
                    }
                };
                match v {
                    crate::ledger::RatingValue::Positive => slot.0 += 1,
                    crate::ledger::RatingValue::Negative => slot.1 += 1,
                }
            }
            profile.sort_unstable_by_key(|&(k, _)| k);
        }
        let v = Rc::new(profiles);
        *self.profile_memo.borrow_mut() = Some(Rc::clone(&v));
        v
    }

    /// Trust of every advisor toward a target under the configured defense's
    /// discounting stage, for diagnostics and tests.
    pub fn advisor_trust(
        &self,
        model: SingleModel,
        buyer: AccountId,
        advisor: AccountId,
        target: SellerId,
    ) -> f64 {
        self.discount_tau(model, buyer, advisor, target)
    }

    pub fn aggregate(&self, account: AccountId, seller: SellerId) -> RatingAggregate {
        self.ledger.aggregate(account, seller)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::AttackKind;
    use crate::ledger::{Honesty, RatingValue, SellerTier};

    /// A small market with a dishonest target, one common seller, two honest
    /// advisors, one constant attacker and a buyer.
    fn market() -> (RatingsLedger, AccountId, SellerId) {
        let mut ledger = RatingsLedger::new(40);
        let target = ledger
            .add_seller(Honesty::Dishonest, SellerTier::DuopolyDishonest)
            .unwrap();
        let common = ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap();
        let mut honest = |ledger: &mut RatingsLedger| {
            let e = ledger.register_entity(Honesty::Honest, None).unwrap();
            ledger.spawn_account(e, 0).unwrap()
        };
        let buyer = honest(&mut ledger);
        let a1 = honest(&mut ledger);
        let a2 = honest(&mut ledger);
        let e = ledger
            .register_entity(Honesty::Dishonest, Some(AttackKind::Constant))
            .unwrap();
        let atk = ledger.spawn_account(e, 0).unwrap();

        for day in 1..=6 {
            ledger.record_transaction(buyer, common, day, RatingValue::Positive).unwrap();
            ledger.record_transaction(a1, common, day, RatingValue::Positive).unwrap();
            ledger.record_transaction(a2, common, day, RatingValue::Positive).unwrap();
            ledger.record_transaction(atk, common, day, RatingValue::Negative).unwrap();
        }
        for day in 7..=12 {
            ledger.record_transaction(a1, target, day, RatingValue::Negative).unwrap();
            ledger.record_transaction(a2, target, day, RatingValue::Negative).unwrap();
            ledger.record_transaction(atk, target, day, RatingValue::Positive).unwrap();
        }
        (ledger, buyer, target)
    }

    #[test]
    fn single_models_stay_in_unit_interval_and_discount_attacker() {
        let (ledger, buyer, target) = market();
        let params = ModelParams::default();
        for defense in crate::models::Defense::all() {
            let ev = Evaluator::new(&ledger, defense, &params);
            let rep = ev.reputation(buyer, target);
            assert!(
                (0.0..=1.0).contains(&rep),
                "{defense}: rep {rep} out of range"
            );
            assert!(
                rep < 0.5,
                "{defense}: dishonest target should score below 0.5, got {rep}"
            );
        }
    }

    #[test]
    fn epsilon_zero_makes_discount_then_filter_equal_filter_alone() {
        let (ledger, buyer, target) = market();
        let mut params = ModelParams::default();
        params.combiner.epsilon = 0.0;
        for filter in [SingleModel::Brs, SingleModel::Iclub] {
            for discount in [SingleModel::Travos, SingleModel::Personalized] {
                let combo = Evaluator::new(
                    &ledger,
                    Defense::DiscountThenFilter { discount, filter },
                    &params,
                );
                let alone = Evaluator::new(&ledger, Defense::Single(filter), &params);
                let got = combo.reputation(buyer, target);
                let want = alone.reputation(buyer, target);
                assert!(
                    (got - want).abs() < 1e-12,
                    "{filter:?}/{discount:?}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn brs_set_excludes_asking_buyer_from_aggregation() {
        let (mut ledger, buyer, target) = market();
        // The buyer now rates the target too and must not advise itself.
        ledger.record_transaction(buyer, target, 13, RatingValue::Negative).unwrap();
        let params = ModelParams::default();
        let ev = Evaluator::new(&ledger, Defense::Single(SingleModel::Brs), &params);
        let with_self_excluded = ev.reputation(buyer, target);
        let other = AccountId(u32::MAX - 1);
        let everyone = ev.reputation(other, target);
        assert!(with_self_excluded > everyone, "buyer's own negative rating must not count");
    }
}
