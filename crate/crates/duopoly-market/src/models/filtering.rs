//! Filtering-based defenses: BRS with the iterative majority-rule filter and
//! iCLUB's local/global clustering filter, plus the shared aggregation of the
//! surviving ratings.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::beta::in_rejection_region;
use crate::ledger::{AccountId, RatingAggregate, RatingsLedger, SellerId};

use super::HonestSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrsParams {
    /// Rejection quantile of the two-sided test, in (0, 0.5).
    pub q: f64,
}

impl Default for BrsParams {
    fn default() -> Self {
        BrsParams { q: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IclubParams {
    /// Single-link L1 distance threshold between normalized rating vectors.
    pub cluster_eps: f64,
    /// Transactions with the target at which a buyer trusts local knowledge.
    pub local_min_transactions: u32,
}

impl Default for IclubParams {
    fn default() -> Self {
        IclubParams {
            cluster_eps: 0.3,
            local_min_transactions: 5,
        }
    }
}

/// Reputation from the surviving ratings: `(Σp + 1) / (Σp + Σn + 2)`.
/// An empty survivor set yields the initial reputation 0.5.
pub fn filtered_reputation(aggs: impl IntoIterator<Item = RatingAggregate>) -> f64 {
    let (mut p, mut n) = (0u64, 0u64);
    for a in aggs {
        p += a.p as u64;
        n += a.n as u64;
    }
    (p as f64 + 1.0) / ((p + n) as f64 + 2.0)
}

/// Whitby's iterative unfair-rating filter.
///
/// Starting from every advisor with at least one rating toward the target
/// (restricted to `universe` when given), repeatedly compute the pooled
/// reputation and drop — simultaneously — every advisor in whose own beta
/// distribution that reputation falls inside the rejection area, until the set
/// is stable. The set shrinks monotonically, so at most `|advisors|` rounds run.
pub fn brs_filter(
    ledger: &RatingsLedger,
    target: SellerId,
    q: f64,
    universe: Option<&[AccountId]>,
) -> HonestSet {
    let advisors: Vec<(AccountId, RatingAggregate)> = ledger
        .raters(target)
        .iter()
        .filter(|a| universe.is_none_or(|u| u.binary_search(a).is_ok()))
        .map(|&a| (a, ledger.aggregate(a, target)))
        .collect();
    let mut active = vec![true; advisors.len()];
    loop {
        let rep = filtered_reputation(
            advisors
                .iter()
                .zip(&active)
                .filter_map(|(&(_, agg), &act)| act.then_some(agg)),
        );
        let mut removed = false;
        for (i, &(_, agg)) in advisors.iter().enumerate() {
            if active[i] && in_rejection_region(rep, agg, q) {
                active[i] = false;
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }
    let mut survivors: Vec<AccountId> = advisors
        .iter()
        .zip(&active)
        .filter_map(|(&(a, _), &act)| act.then_some(a))
        .collect();
    survivors.sort_unstable();
    HonestSet {
        advisors: survivors,
        includes_buyer: false,
    }
}

/// Partition of advisors by single-link threshold clustering: two advisors
/// share a cluster iff they are connected by a chain of pairwise L1 distances
/// at most `eps`. Input vectors are normalized `(p/(p+n), n/(p+n))` pairs, so
/// the L1 distance is twice the gap between first components.
pub fn iclub_cluster(vectors: &[(AccountId, [f64; 2])], eps: f64) -> Vec<Vec<AccountId>> {
    let mut items: Vec<(f64, AccountId)> = vectors.iter().map(|&(a, v)| (v[0], a)).collect();
    items.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let mut clusters: Vec<Vec<AccountId>> = Vec::new();
    let mut prev: Option<f64> = None;
    for (m, a) in items {
        let linked = prev.is_some_and(|p| 2.0 * (m - p) <= eps + 1e-9);
        if linked {
            clusters.last_mut().unwrap().push(a);
        } else {
            clusters.push(vec![a]);
        }
        prev = Some(m);
    }
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters
}

/// Cluster assignment for one seller's raters, indexed densely by account.
#[derive(Debug, Clone, Default)]
pub struct ClusterAssignment {
    /// Cluster index per account id; `u32::MAX` marks accounts that did not
    /// rate the seller.
    cluster_of: Vec<u32>,
    clusters: Vec<Vec<AccountId>>,
}

impl ClusterAssignment {
    pub fn cluster_of(&self, account: AccountId) -> Option<u32> {
        match self.cluster_of.get(account.0 as usize) {
            Some(&c) if c != u32::MAX => Some(c),
            _ => None,
        }
    }

    pub fn clusters(&self) -> &[Vec<AccountId>] {
        &self.clusters
    }
}

/// Per-evaluation clustering context: memoizes one assignment per seller for a
/// fixed ledger snapshot and advisor universe. The buyer always takes part in
/// the clusterings even when a restricted universe leaves it out.
pub struct ClusterCtx<'a> {
    ledger: &'a RatingsLedger,
    eps: f64,
    universe: Option<&'a [AccountId]>,
    buyer: Option<AccountId>,
    memo: RefCell<HashMap<SellerId, Rc<ClusterAssignment>>>,
}

impl<'a> ClusterCtx<'a> {
    pub fn new(ledger: &'a RatingsLedger, eps: f64, universe: Option<&'a [AccountId]>) -> Self {
        ClusterCtx {
            ledger,
            eps,
            universe,
            buyer: None,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Restricted-universe context for one buyer's evaluation.
    pub fn for_buyer(
        ledger: &'a RatingsLedger,
        eps: f64,
        universe: &'a [AccountId],
        buyer: AccountId,
    ) -> Self {
        ClusterCtx {
            ledger,
            eps,
            universe: Some(universe),
            buyer: Some(buyer),
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn in_universe(&self, account: AccountId) -> bool {
        Some(account) == self.buyer
            || self.universe.is_none_or(|u| u.binary_search(&account).is_ok())
    }

    /// Clustering of all of `seller`'s raters (in the universe) by their
    /// normalized rating vectors toward that seller.
    pub fn assignment(&self, seller: SellerId) -> Rc<ClusterAssignment> {
        if let Some(asg) = self.memo.borrow().get(&seller) {
            return Rc::clone(asg);
        }
        let asg = Rc::new(self.compute(seller, None));
        self.memo.borrow_mut().insert(seller, Rc::clone(&asg));
        asg
    }

    /// Uncached clustering that leaves one account out (the buyer, when its
    /// own vector must not take part).
    pub fn assignment_without(&self, seller: SellerId, excluded: AccountId) -> ClusterAssignment {
        self.compute(seller, Some(excluded))
    }

    fn compute(&self, seller: SellerId, excluded: Option<AccountId>) -> ClusterAssignment {
        let mut items: Vec<(f64, AccountId)> = self
            .ledger
            .raters(seller)
            .iter()
            .filter(|&&a| Some(a) != excluded && self.in_universe(a))
            .map(|&a| {
                let agg = self.ledger.aggregate(a, seller);
                (agg.p as f64 / agg.total() as f64, a)
            })
            .collect();
        items.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));

        let mut cluster_of = vec![u32::MAX; self.ledger.accounts().len()];
        let mut clusters: Vec<Vec<AccountId>> = Vec::new();
        let mut prev: Option<f64> = None;
        for (m, a) in items {
            let linked = prev.is_some_and(|p| 2.0 * (m - p) <= self.eps + 1e-9);
            if !linked {
                clusters.push(Vec::new());
            }
            let idx = clusters.len() - 1;
            clusters[idx].push(a);
            cluster_of[a.0 as usize] = idx as u32;
            prev = Some(m);
        }
        for c in &mut clusters {
            c.sort_unstable();
        }
        ClusterAssignment { cluster_of, clusters }
    }
}

/// iCLUB's filter for one (buyer, target) evaluation.
///
/// With enough of the buyer's own transactions the reliable local knowledge is
/// used: advisors survive iff they share the buyer's cluster toward the target,
/// and the buyer's own ratings join the aggregation. Otherwise global knowledge
/// applies: companions — advisors clustering with the buyer for every non-target
/// seller they both rated — anchor the surviving clusters, falling back to the
/// plain majority rule when no companion exists.
pub fn iclub_filter(
    ctx: &ClusterCtx<'_>,
    buyer: AccountId,
    target: SellerId,
    params: &IclubParams,
) -> HonestSet {
    let ledger = ctx.ledger;
    let buyer_transactions = ledger.aggregate(buyer, target).total();

    if buyer_transactions >= params.local_min_transactions {
        // LOCAL: the buyer never lies to himself.
        let asg = ctx.assignment(target);
        let buyer_cluster = asg.cluster_of(buyer).expect("buyer rated the target");
        let mut survivors: Vec<AccountId> = ledger
            .raters(target)
            .iter()
            .filter(|&&a| a != buyer && ctx.in_universe(a) && asg.cluster_of(a) == Some(buyer_cluster))
            .copied()
            .collect();
        survivors.sort_unstable();
        return HonestSet {
            advisors: survivors,
            includes_buyer: true,
        };
    }

    // GLOBAL: identify companions over the sellers the buyer knows.
    let buyer_sellers: Vec<(SellerId, Rc<ClusterAssignment>, u32)> = ledger
        .sellers()
        .iter()
        .map(|s| s.id)
        .filter(|&s| s != target && ledger.aggregate(buyer, s).total() > 0)
        .map(|s| {
            let asg = ctx.assignment(s);
            let bc = asg.cluster_of(buyer).expect("buyer rated this seller");
            (s, asg, bc)
        })
        .collect();

    let mut companions: Vec<AccountId> = Vec::new();
    for account in ledger.accounts() {
        let a = account.id;
        if a == buyer || !ctx.in_universe(a) {
            continue;
        }
        let mut any_common = false;
        let mut all_match = true;
        for (s, asg, bc) in &buyer_sellers {
            if ledger.aggregate(a, *s).total() == 0 {
                continue;
            }
            any_common = true;
            if asg.cluster_of(a) != Some(*bc) {
                all_match = false;
                break;
            }
        }
        if any_common && all_match {
            companions.push(a);
        }
    }

    let target_asg = ctx.assignment_without(target, buyer);
    let mut survivors: Vec<AccountId> = if !companions.is_empty() {
        let anchored: Vec<u32> = companions
            .iter()
            .filter_map(|&c| target_asg.cluster_of(c))
            .collect();
        target_asg
            .clusters()
            .iter()
            .enumerate()
            .filter(|(i, _)| anchored.contains(&(*i as u32)))
            .flat_map(|(_, members)| members.iter().copied())
            .collect()
    } else {
        // Majority rule: the largest cluster wins; ties go to the cluster
        // containing the smallest advisor id.
        target_asg
            .clusters()
            .iter()
            .max_by(|x, y| {
                x.len()
                    .cmp(&y.len())
                    .then_with(|| y[0].cmp(&x[0]))
            })
            .cloned()
            .unwrap_or_default()
    };
    survivors.sort_unstable();
    HonestSet {
        advisors: survivors,
        includes_buyer: false,
    }
}
