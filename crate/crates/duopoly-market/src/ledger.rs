//! Canonical market data model: sellers, buyer entities, buyer accounts and the
//! append-only ratings ledger with its aggregate queries.
//!
//! Entities and accounts are distinct on purpose: a whitewashing buyer keeps
//! its entity identity while cycling through fresh accounts, and trust models
//! are only ever shown accounts. The entity linkage exists for the simulator's
//! ground-truth bookkeeping.

use std::fmt::Write as _;

use thiserror::Error;

use crate::attack::AttackKind;
use crate::beta::beta_mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SellerId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccountId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Honesty {
    Honest,
    Dishonest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SellerTier {
    DuopolyHonest,
    DuopolyDishonest,
    Common,
}

#[derive(Debug, Clone)]
pub struct SellerProfile {
    pub id: SellerId,
    pub honesty: Honesty,
    pub tier: SellerTier,
}

#[derive(Debug, Clone)]
pub struct BuyerEntity {
    pub id: EntityId,
    pub honesty: Honesty,
    /// Attack strategy tag; present iff the entity is dishonest.
    pub strategy: Option<AttackKind>,
}

#[derive(Debug, Clone)]
pub struct BuyerAccount {
    pub id: AccountId,
    pub owner: EntityId,
    pub created_day: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatingValue {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rating {
    pub account: AccountId,
    pub seller: SellerId,
    pub day: u16,
    pub value: RatingValue,
}

/// Per (advisor, seller) positive/negative counts: the beta evidence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RatingAggregate {
    pub p: u32,
    pub n: u32,
}

impl RatingAggregate {
    pub fn total(&self) -> u32 {
        self.p + self.n
    }

    /// Expected beta reputation of this evidence alone.
    pub fn mean(&self) -> f64 {
        beta_mean(self.p as u64, self.n as u64)
    }

    fn add(&mut self, value: RatingValue) {
        match value {
            RatingValue::Positive => self.p += 1,
            RatingValue::Negative => self.n += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("unknown account {0:?}")]
    UnknownAccount(AccountId),
    #[error("unknown seller {0:?}")]
    UnknownSeller(SellerId),
    #[error("unknown entity {0:?}")]
    UnknownEntity(EntityId),
    #[error("day {day} outside horizon [1, {horizon}]")]
    DayOutOfRange { day: u16, horizon: u16 },
    #[error("account {account:?} already rated on day {day}")]
    DuplicateRating { account: AccountId, day: u16 },
    #[error("day {day} precedes day {last} already in the ledger")]
    NonMonotonicDay { day: u16, last: u16 },
    #[error("market already has a {0:?} seller")]
    DuplicateDuopolySeller(SellerTier),
    #[error("seller honesty does not match its duopoly tier")]
    TierHonestyMismatch,
    #[error("honest entity cannot carry an attack strategy")]
    HonestWithStrategy,
    #[error("dishonest entity requires an attack strategy")]
    DishonestWithoutStrategy,
}

/// Append-only store of ratings plus the seller/entity/account registries.
///
/// All queries are pure functions of the current contents; recorded ratings are
/// never mutated or removed.
#[derive(Debug, Clone, Default)]
pub struct RatingsLedger {
    horizon: u16,
    sellers: Vec<SellerProfile>,
    entities: Vec<BuyerEntity>,
    accounts: Vec<BuyerAccount>,
    ratings: Vec<Rating>,
    // Derived indices, maintained on append.
    aggregates: Vec<Vec<RatingAggregate>>, // [account][seller]
    raters: Vec<Vec<AccountId>>,           // [seller], in order of first rating
    history: Vec<Vec<(SellerId, u16, RatingValue)>>, // [account], append order
    last_rating_day: Vec<u16>,             // [account], 0 = never rated
    seller_cumulative: Vec<Vec<(u16, u32, u32)>>, // [seller]: (day, pos, neg) checkpoints
    entity_accounts: Vec<Vec<AccountId>>,  // [entity]
}

impl RatingsLedger {
    /// Create an empty ledger accepting days `1..=horizon`.
    pub fn new(horizon: u16) -> Self {
        RatingsLedger {
            horizon,
            ..Default::default()
        }
    }

    pub fn horizon(&self) -> u16 {
        self.horizon
    }

    pub fn add_seller(&mut self, honesty: Honesty, tier: SellerTier) -> Result<SellerId, LedgerError> {
        match tier {
            SellerTier::DuopolyHonest => {
                if honesty != Honesty::Honest {
                    return Err(LedgerError::TierHonestyMismatch);
                }
                if self.sellers.iter().any(|s| s.tier == tier) {
                    return Err(LedgerError::DuplicateDuopolySeller(tier));
                }
            }
            SellerTier::DuopolyDishonest => {
                if honesty != Honesty::Dishonest {
                    return Err(LedgerError::TierHonestyMismatch);
                }
                if self.sellers.iter().any(|s| s.tier == tier) {
                    return Err(LedgerError::DuplicateDuopolySeller(tier));
                }
            }
            SellerTier::Common => {}
        }
        let id = SellerId(self.sellers.len() as u16);
        self.sellers.push(SellerProfile { id, honesty, tier });
        self.raters.push(Vec::new());
        self.seller_cumulative.push(Vec::new());
        Ok(id)
    }

    pub fn register_entity(
        &mut self,
        honesty: Honesty,
        strategy: Option<AttackKind>,
    ) -> Result<EntityId, LedgerError> {
        match (honesty, strategy) {
            (Honesty::Honest, Some(_)) => return Err(LedgerError::HonestWithStrategy),
            (Honesty::Dishonest, None) => return Err(LedgerError::DishonestWithoutStrategy),
            _ => {}
        }
        let id = EntityId(self.entities.len() as u16);
        self.entities.push(BuyerEntity { id, honesty, strategy });
        self.entity_accounts.push(Vec::new());
        Ok(id)
    }

    /// Open a fresh account for `entity`. The new account has no rating history
    /// and is indistinguishable from a never-seen advisor to every trust model.
    pub fn spawn_account(&mut self, entity: EntityId, day: u16) -> Result<AccountId, LedgerError> {
        if entity.0 as usize >= self.entities.len() {
            return Err(LedgerError::UnknownEntity(entity));
        }
        let id = AccountId(self.accounts.len() as u32);
        self.accounts.push(BuyerAccount {
            id,
            owner: entity,
            created_day: day,
        });
        self.aggregates.push(vec![RatingAggregate::default(); self.sellers.len()]);
        self.history.push(Vec::new());
        self.last_rating_day.push(0);
        self.entity_accounts[entity.0 as usize].push(id);
        Ok(id)
    }

    /// Append one rating. Each account transacts at most once per day, and
    /// days never decrease in ledger order; violations signal a scheduler bug.
    pub fn record_transaction(
        &mut self,
        account: AccountId,
        seller: SellerId,
        day: u16,
        value: RatingValue,
    ) -> Result<(), LedgerError> {
        let a = account.0 as usize;
        let s = seller.0 as usize;
        if a >= self.accounts.len() {
            return Err(LedgerError::UnknownAccount(account));
        }
        if s >= self.sellers.len() {
            return Err(LedgerError::UnknownSeller(seller));
        }
        if day == 0 || day > self.horizon {
            return Err(LedgerError::DayOutOfRange {
                day,
                horizon: self.horizon,
            });
        }
        if let Some(last) = self.ratings.last() {
            if day < last.day {
                return Err(LedgerError::NonMonotonicDay { day, last: last.day });
            }
        }
        if self.last_rating_day[a] == day {
            return Err(LedgerError::DuplicateRating { account, day });
        }

        self.ratings.push(Rating {
            account,
            seller,
            day,
            value,
        });
        if self.aggregates[a][s].total() == 0 {
            self.raters[s].push(account);
        }
        self.aggregates[a][s].add(value);
        self.history[a].push((seller, day, value));
        self.last_rating_day[a] = day;

        let (mut pos, mut neg) = self
            .seller_cumulative[s]
            .last()
            .map(|&(_, p, n)| (p, n))
            .unwrap_or((0, 0));
        match value {
            RatingValue::Positive => pos += 1,
            RatingValue::Negative => neg += 1,
        }
        self.seller_cumulative[s].push((day, pos, neg));
        Ok(())
    }

    /// Exact (p, n) counts of this account's ratings toward `seller`.
    /// Unknown ids simply have no evidence.
    pub fn aggregate(&self, account: AccountId, seller: SellerId) -> RatingAggregate {
        self.aggregates
            .get(account.0 as usize)
            .and_then(|per_seller| per_seller.get(seller.0 as usize))
            .copied()
            .unwrap_or_default()
    }

    /// Entity-level counts, summed over all of the entity's accounts. Used only
    /// by the simulator's ground-truth bookkeeping; trust models see accounts.
    pub fn entity_aggregate(&self, entity: EntityId, seller: SellerId) -> RatingAggregate {
        let mut sum = RatingAggregate::default();
        if let Some(accounts) = self.entity_accounts.get(entity.0 as usize) {
            for &a in accounts {
                let agg = self.aggregate(a, seller);
                sum.p += agg.p;
                sum.n += agg.n;
            }
        }
        sum
    }

    /// Accounts with at least one rating toward `seller`, in first-rating order.
    pub fn raters(&self, seller: SellerId) -> &[AccountId] {
        &self.raters[seller.0 as usize]
    }

    /// This account's full rating history in append order.
    pub fn account_history(&self, account: AccountId) -> &[(SellerId, u16, RatingValue)] {
        &self.history[account.0 as usize]
    }

    /// Market-wide (pos, neg) totals toward `seller` over days `1..=day`.
    pub fn seller_counts_up_to(&self, seller: SellerId, day: u16) -> (u32, u32) {
        let cum = &self.seller_cumulative[seller.0 as usize];
        match cum.binary_search_by(|&(d, _, _)| d.cmp(&day).then(std::cmp::Ordering::Less)) {
            Ok(_) => unreachable!("comparator never returns Equal"),
            Err(0) => (0, 0),
            Err(i) => {
                let (_, p, n) = cum[i - 1];
                (p, n)
            }
        }
    }

    /// This account's (pos, neg) counts toward `seller` over days `1..=day`.
    pub fn account_counts_up_to(&self, account: AccountId, seller: SellerId, day: u16) -> (u32, u32) {
        let mut p = 0;
        let mut n = 0;
        for &(s, d, v) in &self.history[account.0 as usize] {
            if s == seller && d <= day {
                match v {
                    RatingValue::Positive => p += 1,
                    RatingValue::Negative => n += 1,
                }
            }
        }
        (p, n)
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn sellers(&self) -> &[SellerProfile] {
        &self.sellers
    }

    pub fn entities(&self) -> &[BuyerEntity] {
        &self.entities
    }

    pub fn accounts(&self) -> &[BuyerAccount] {
        &self.accounts
    }

    pub fn account(&self, id: AccountId) -> &BuyerAccount {
        &self.accounts[id.0 as usize]
    }

    pub fn entity_account_ids(&self, entity: EntityId) -> &[AccountId] {
        &self.entity_accounts[entity.0 as usize]
    }

    pub fn seller_honesty(&self, seller: SellerId) -> Honesty {
        self.sellers[seller.0 as usize].honesty
    }

    /// Line-oriented record dump, one rating per line: `day,account,seller,value`.
    pub fn to_line_format(&self) -> String {
        let mut out = String::with_capacity(self.ratings.len() * 12);
        for r in &self.ratings {
            let v = match r.value {
                RatingValue::Positive => 'P',
                RatingValue::Negative => 'N',
            };
            writeln!(out, "{},{},{},{}", r.day, r.account.0, r.seller.0, v).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market() -> (RatingsLedger, EntityId, AccountId, SellerId) {
        let mut ledger = RatingsLedger::new(100);
        let seller = ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap();
        let entity = ledger.register_entity(Honesty::Honest, None).unwrap();
        let account = ledger.spawn_account(entity, 0).unwrap();
        (ledger, entity, account, seller)
    }

    #[test]
    fn single_append_updates_aggregate() {
        let (mut ledger, _, a1, s1) = market();
        ledger.record_transaction(a1, s1, 1, RatingValue::Positive).unwrap();
        assert_eq!(ledger.ratings().len(), 1);
        assert_eq!(ledger.aggregate(a1, s1), RatingAggregate { p: 1, n: 0 });
    }

    #[test]
    fn duplicate_account_day_rejected() {
        let (mut ledger, _, a1, s1) = market();
        ledger.record_transaction(a1, s1, 1, RatingValue::Positive).unwrap();
        let err = ledger.record_transaction(a1, s1, 1, RatingValue::Negative);
        assert_eq!(
            err,
            Err(LedgerError::DuplicateRating { account: a1, day: 1 })
        );
        assert_eq!(ledger.ratings().len(), 1);
    }

    #[test]
    fn unknown_ids_rejected() {
        let (mut ledger, _, a1, s1) = market();
        assert!(matches!(
            ledger.record_transaction(AccountId(99), s1, 1, RatingValue::Positive),
            Err(LedgerError::UnknownAccount(_))
        ));
        assert!(matches!(
            ledger.record_transaction(a1, SellerId(99), 1, RatingValue::Positive),
            Err(LedgerError::UnknownSeller(_))
        ));
        assert!(matches!(
            ledger.record_transaction(a1, s1, 0, RatingValue::Positive),
            Err(LedgerError::DayOutOfRange { .. })
        ));
        assert!(matches!(
            ledger.record_transaction(a1, s1, 101, RatingValue::Positive),
            Err(LedgerError::DayOutOfRange { .. })
        ));
    }

    #[test]
    fn hundred_days_sum_by_enumeration() {
        // One rating per day for 100 days, round-robin over three sellers;
        // the oracle recounts the appended list directly.
        let mut ledger = RatingsLedger::new(100);
        let sellers: Vec<SellerId> = (0..3)
            .map(|_| ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap())
            .collect();
        let e = ledger.register_entity(Honesty::Honest, None).unwrap();
        let a = ledger.spawn_account(e, 0).unwrap();
        for day in 1..=100u16 {
            let s = sellers[(day % 3) as usize];
            let v = if day % 2 == 0 {
                RatingValue::Positive
            } else {
                RatingValue::Negative
            };
            ledger.record_transaction(a, s, day, v).unwrap();
        }
        let by_enumeration = ledger
            .ratings()
            .iter()
            .filter(|r| r.account == a)
            .count() as u32;
        let by_aggregate: u32 = sellers
            .iter()
            .map(|&s| ledger.aggregate(a, s).total())
            .sum();
        assert_eq!(by_enumeration, 100);
        assert_eq!(by_aggregate, 100);
    }

    #[test]
    fn mixed_ratings_aggregate() {
        let (mut ledger, _, a, s) = market();
        for (day, v) in [
            (1, RatingValue::Positive),
            (2, RatingValue::Positive),
            (3, RatingValue::Negative),
        ] {
            ledger.record_transaction(a, s, day, v).unwrap();
        }
        assert_eq!(ledger.aggregate(a, s), RatingAggregate { p: 2, n: 1 });
        assert_eq!(ledger.aggregate(AccountId(7), s), RatingAggregate::default());
    }

    #[test]
    fn whitewashing_entity_account_vs_entity_view() {
        // Ten one-transaction accounts: each account shows (0,1), the entity (0,10).
        let mut ledger = RatingsLedger::new(100);
        let s = ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap();
        let e = ledger
            .register_entity(Honesty::Dishonest, Some(AttackKind::Whitewashing))
            .unwrap();
        for day in 1..=10u16 {
            let a = ledger.spawn_account(e, day).unwrap();
            ledger.record_transaction(a, s, day, RatingValue::Negative).unwrap();
        }
        assert_eq!(ledger.entity_aggregate(e, s), RatingAggregate { p: 0, n: 10 });
        for &a in ledger.entity_account_ids(e) {
            assert_eq!(ledger.aggregate(a, s), RatingAggregate { p: 0, n: 1 });
        }
    }

    #[test]
    fn spawned_accounts_unique_and_fresh() {
        let (mut ledger, e, _, s) = market();
        let a1 = ledger.spawn_account(e, 3).unwrap();
        let a2 = ledger.spawn_account(e, 3).unwrap();
        assert_ne!(a1, a2);
        // A fresh account carries no evidence: default reputation 0.5.
        assert_eq!(ledger.aggregate(a2, s).mean(), 0.5);
    }

    #[test]
    fn entity_invariants_enforced() {
        let mut ledger = RatingsLedger::new(10);
        assert_eq!(
            ledger.register_entity(Honesty::Honest, Some(AttackKind::Constant)),
            Err(LedgerError::HonestWithStrategy)
        );
        assert_eq!(
            ledger.register_entity(Honesty::Dishonest, None),
            Err(LedgerError::DishonestWithoutStrategy)
        );
    }

    #[test]
    fn duopoly_seller_invariants() {
        let mut ledger = RatingsLedger::new(10);
        ledger.add_seller(Honesty::Honest, SellerTier::DuopolyHonest).unwrap();
        assert_eq!(
            ledger.add_seller(Honesty::Honest, SellerTier::DuopolyHonest),
            Err(LedgerError::DuplicateDuopolySeller(SellerTier::DuopolyHonest))
        );
        assert_eq!(
            ledger.add_seller(Honesty::Honest, SellerTier::DuopolyDishonest),
            Err(LedgerError::TierHonestyMismatch)
        );
    }

    #[test]
    fn cumulative_counts_by_day() {
        let (mut ledger, e, a, s) = market();
        let b = ledger.spawn_account(e, 0).unwrap();
        ledger.record_transaction(a, s, 1, RatingValue::Positive).unwrap();
        ledger.record_transaction(b, s, 2, RatingValue::Negative).unwrap();
        ledger.record_transaction(a, s, 3, RatingValue::Positive).unwrap();
        assert_eq!(ledger.seller_counts_up_to(s, 1), (1, 0));
        assert_eq!(ledger.seller_counts_up_to(s, 2), (1, 1));
        assert_eq!(ledger.seller_counts_up_to(s, 99), (2, 1));
        assert_eq!(ledger.account_counts_up_to(a, s, 2), (1, 0));
        assert_eq!(ledger.account_counts_up_to(a, s, 3), (2, 0));
    }

    #[test]
    fn line_format_dump() {
        let (mut ledger, _, a, s) = market();
        ledger.record_transaction(a, s, 1, RatingValue::Positive).unwrap();
        ledger.record_transaction(a, s, 2, RatingValue::Negative).unwrap();
        assert_eq!(ledger.to_line_format(), "1,0,0,P\n2,0,0,N\n");
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // Appending never disturbs earlier contents, per-day uniqueness holds,
        // and aggregates equal direct recounts of the rating list.
        #[test]
        fn append_only_and_aggregates_consistent(
            ops in proptest::collection::vec((0u32..6, 0u16..4, 1u16..30, proptest::bool::ANY), 1..120)
        ) {
            let mut ledger = RatingsLedger::new(30);
            let mut sellers = Vec::new();
            for _ in 0..4 {
                sellers.push(ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap());
            }
            let e = ledger.register_entity(Honesty::Honest, None).unwrap();
            let mut accounts = Vec::new();
            for _ in 0..6 {
                accounts.push(ledger.spawn_account(e, 0).unwrap());
            }

            // Replay in nondecreasing day order, skipping rejected appends.
            let mut ops = ops;
            ops.sort_by_key(|&(_, _, day, _)| day);
            let mut before = Vec::new();
            for (ai, si, day, pos) in ops {
                let v = if pos { RatingValue::Positive } else { RatingValue::Negative };
                let snapshot = ledger.ratings().to_vec();
                let res = ledger.record_transaction(accounts[ai as usize], sellers[si as usize], day, v);
                match res {
                    Ok(()) => {
                        // prefix preserved
                        prop_assert_eq!(&ledger.ratings()[..snapshot.len()], &snapshot[..]);
                        prop_assert_eq!(ledger.ratings().len(), snapshot.len() + 1);
                    }
                    Err(LedgerError::DuplicateRating { .. }) => {
                        prop_assert_eq!(ledger.ratings(), &snapshot[..]);
                    }
                    Err(other) => return Err(TestCaseError::fail(format!("unexpected error {other}"))),
                }
                before = snapshot;
            }
            let _ = before;

            // per-day uniqueness
            let mut seen = std::collections::HashSet::new();
            for r in ledger.ratings() {
                prop_assert!(seen.insert((r.account, r.day)));
            }

            // aggregates equal recounts
            for &a in &accounts {
                for &s in &sellers {
                    let agg = ledger.aggregate(a, s);
                    let p = ledger.ratings().iter()
                        .filter(|r| r.account == a && r.seller == s && r.value == RatingValue::Positive)
                        .count() as u32;
                    let n = ledger.ratings().iter()
                        .filter(|r| r.account == a && r.seller == s && r.value == RatingValue::Negative)
                        .count() as u32;
                    prop_assert_eq!(agg, RatingAggregate { p, n });
                }
            }
        }
    }
}
