//! Discounting-based defenses: TRAVOS and the Personalized approach, plus the
//! trust-weighted aggregation they share.

use serde::{Deserialize, Serialize};

use crate::beta::beta_cdf;
use crate::ledger::{AccountId, RatingAggregate, RatingValue, RatingsLedger, SellerId};

/// Advisor trustworthiness in [0, 1] with the evidence count behind it
/// (reference sellers for TRAVOS, rating pairs for Personalized).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvisorTrust {
    pub tau: f64,
    pub evidence: u32,
}

impl AdvisorTrust {
    /// Trust of a never-seen advisor.
    pub const DEFAULT: AdvisorTrust = AdvisorTrust { tau: 0.5, evidence: 0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravosParams {
    /// Number of equal-width bins partitioning [0, 1].
    pub num_bins: u32,
}

impl Default for TravosParams {
    fn default() -> Self {
        TravosParams { num_bins: 5 }
    }
}

/// How buyer/advisor ratings toward a commonly rated seller are paired inside
/// one time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairingMode {
    /// At most one pair per (seller, window); agreement compares the two
    /// majority values within the window (ties disagree).
    PerWindow,
    /// Every (buyer rating, advisor rating) combination within the window.
    CrossProduct,
}

/// What evidence count drives the private-trust weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightEvidence {
    Pairs,
    CommonSellers,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonalizedParams {
    /// Evidence count at which the buyer relies on private trust alone.
    pub n_min: u32,
    /// Width of the rating-pairing time window, in days.
    pub window_days: u16,
    pub pairing: PairingMode,
    pub weight_evidence: WeightEvidence,
}

impl Default for PersonalizedParams {
    fn default() -> Self {
        PersonalizedParams {
            n_min: 3,
            window_days: 100,
            pairing: PairingMode::CrossProduct,
            weight_evidence: WeightEvidence::CommonSellers,
        }
    }
}

/// Trust-discounted reputation: `(Σ τ_i p_i + 1) / (Σ τ_i p_i + Σ τ_i n_i + 2)`.
/// No advisors (or all trust zero) leaves the initial reputation 0.5.
pub fn discounted_reputation(items: impl IntoIterator<Item = (f64, RatingAggregate)>) -> f64 {
    let (mut wp, mut wn) = (0.0f64, 0.0f64);
    for (tau, agg) in items {
        wp += tau * agg.p as f64;
        wn += tau * agg.n as f64;
    }
    (wp + 1.0) / (wp + wn + 2.0)
}

fn bin_index(o: f64, bins: u32) -> u32 {
    ((o * bins as f64).floor() as u32).min(bins - 1)
}

fn bin_bounds(idx: u32, bins: u32) -> (f64, f64) {
    (idx as f64 / bins as f64, (idx + 1) as f64 / bins as f64)
}

/// TRAVOS advisor trust.
///
/// The advisor's opinion of the target is summarized by the beta mean of its
/// ratings; reference sellers are the other sellers where the advisor's
/// opinion lands in the same bin and the buyer has personal outcomes. The
/// buyer's pooled (P, N) outcomes over the reference sellers then give the
/// probability mass of `Beta(P+1, N+1)` inside the bin. With no reference
/// sellers the advisor keeps the default trust 0.5.
pub fn travos_trust(
    ledger: &RatingsLedger,
    buyer: AccountId,
    advisor: AccountId,
    target: SellerId,
    params: &TravosParams,
) -> AdvisorTrust {
    debug_assert_ne!(buyer, advisor);
    let bins = params.num_bins;
    let o = ledger.aggregate(advisor, target).mean();
    let target_bin = bin_index(o, bins);

    // Distinct sellers the advisor has rated, from its history.
    let mut rated = vec![false; ledger.sellers().len()];
    for &(s, _, _) in ledger.account_history(advisor) {
        rated[s.0 as usize] = true;
    }

    let mut pooled = RatingAggregate::default();
    let mut reference_sellers = 0u32;
    for (i, &was_rated) in rated.iter().enumerate() {
        let s = SellerId(i as u16);
        if !was_rated || s == target {
            continue;
        }
        let buyer_outcomes = ledger.aggregate(buyer, s);
        if buyer_outcomes.total() == 0 {
            continue;
        }
        if bin_index(ledger.aggregate(advisor, s).mean(), bins) != target_bin {
            continue;
        }
        reference_sellers += 1;
        pooled.p += buyer_outcomes.p;
        pooled.n += buyer_outcomes.n;
    }
    if reference_sellers == 0 {
        return AdvisorTrust::DEFAULT;
    }

    let (lo, hi) = bin_bounds(target_bin, bins);
    let alpha = pooled.p as f64 + 1.0;
    let beta = pooled.n as f64 + 1.0;
    let tau = beta_cdf(hi, alpha, beta).expect("bin bounds in [0,1]")
        - beta_cdf(lo, alpha, beta).expect("bin bounds in [0,1]");
    AdvisorTrust {
        tau,
        evidence: reference_sellers,
    }
}

/// Outcome of the private-trust comparison between a buyer and an advisor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivateTrust {
    pub trust: f64,
    /// Number of rating pairs compared.
    pub pairs: u32,
    /// Distinct commonly rated sellers contributing at least one pair.
    pub common_sellers: u32,
}

/// Per-window (positive, negative) counts toward one seller.
type BucketCounts = Vec<((u16, u16), (u32, u32))>; // ((seller, bucket), (p, n)) sorted

fn bucket_profile(ledger: &RatingsLedger, account: AccountId, window_days: u16) -> BucketCounts {
    let mut counts: BucketCounts = Vec::new();
    for &(s, day, v) in ledger.account_history(account) {
        let key = (s.0, (day - 1) / window_days);
        let slot = match counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => c,
            None => {
                counts.push((key, (0, 0)));
                &mut counts.last_mut().unwrap().1
            }
        };
        match v {
            RatingValue::Positive => slot.0 += 1,
            RatingValue::Negative => slot.1 += 1,
        }
    }
    counts.sort_unstable_by_key(|&(k, _)| k);
    counts
}

fn majority(p: u32, n: u32) -> Option<RatingValue> {
    match p.cmp(&n) {
        std::cmp::Ordering::Greater => Some(RatingValue::Positive),
        std::cmp::Ordering::Less => Some(RatingValue::Negative),
        std::cmp::Ordering::Equal => None,
    }
}

/// Private trust: compare the buyer's and the advisor's ratings to their
/// commonly rated sellers, pairing ratings that fall in the same time window.
pub fn personalized_private_trust(
    ledger: &RatingsLedger,
    buyer: AccountId,
    advisor: AccountId,
    params: &PersonalizedParams,
) -> PrivateTrust {
    debug_assert_ne!(buyer, advisor);
    let b = bucket_profile(ledger, buyer, params.window_days);
    let a = bucket_profile(ledger, advisor, params.window_days);
    private_trust_from_profiles(&b, &a, params)
}

pub(crate) fn private_trust_from_profiles(
    buyer: &BucketCounts,
    advisor: &BucketCounts,
    params: &PersonalizedParams,
) -> PrivateTrust {
    let mut n_all = 0u64;
    let mut n_c = 0u64;
    let mut common_sellers = 0u32;
    let mut last_seller: Option<u16> = None;

    // Both profiles are sorted by (seller, bucket): merge-join.
    let (mut i, mut j) = (0, 0);
    while i < buyer.len() && j < advisor.len() {
        let (bk, (bp, bn)) = buyer[i];
        let (ak, (ap, an)) = advisor[j];
        match bk.cmp(&ak) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                match params.pairing {
                    PairingMode::PerWindow => {
                        n_all += 1;
                        if let (Some(x), Some(y)) = (majority(bp, bn), majority(ap, an)) {
                            if x == y {
                                n_c += 1;
                            }
                        }
                    }
                    PairingMode::CrossProduct => {
                        n_all += ((bp + bn) as u64) * ((ap + an) as u64);
                        n_c += (bp as u64) * (ap as u64) + (bn as u64) * (an as u64);
                    }
                }
                if last_seller != Some(bk.0) {
                    common_sellers += 1;
                    last_seller = Some(bk.0);
                }
                i += 1;
                j += 1;
            }
        }
    }

    PrivateTrust {
        trust: (n_c as f64 + 1.0) / (n_all as f64 + 2.0),
        pairs: n_all.min(u32::MAX as u64) as u32,
        common_sellers,
    }
}

/// Public trust: each of the advisor's ratings is consistent iff it equals the
/// strict majority of all other advisors' ratings to that seller up to that
/// day (ties count as inconsistent).
pub fn personalized_public_trust(ledger: &RatingsLedger, advisor: AccountId) -> f64 {
    let mut own = vec![(0u32, 0u32); ledger.sellers().len()];
    let mut n_all = 0u64;
    let mut n_c = 0u64;
    for &(s, day, v) in ledger.account_history(advisor) {
        let slot = &mut own[s.0 as usize];
        match v {
            RatingValue::Positive => slot.0 += 1,
            RatingValue::Negative => slot.1 += 1,
        }
        let (tp, tn) = ledger.seller_counts_up_to(s, day);
        let (pool_p, pool_n) = (tp - slot.0, tn - slot.1);
        let consistent = match v {
            RatingValue::Positive => pool_p > pool_n,
            RatingValue::Negative => pool_n > pool_p,
        };
        n_all += 1;
        if consistent {
            n_c += 1;
        }
    }
    (n_c as f64 + 1.0) / (n_all as f64 + 2.0)
}

/// Personalized advisor trust: private and public trust blended by the
/// evidence weight `w = min(1, evidence / n_min)`. At or beyond the threshold
/// the buyer uses private trust alone.
pub fn personalized_trust(
    ledger: &RatingsLedger,
    buyer: AccountId,
    advisor: AccountId,
    params: &PersonalizedParams,
) -> AdvisorTrust {
    let public = personalized_public_trust(ledger, advisor);
    personalized_trust_with_public(ledger, buyer, advisor, params, public)
}

pub(crate) fn personalized_trust_with_public(
    ledger: &RatingsLedger,
    buyer: AccountId,
    advisor: AccountId,
    params: &PersonalizedParams,
    public: f64,
) -> AdvisorTrust {
    let private = personalized_private_trust(ledger, buyer, advisor, params);
    blend_trust(&private, public, params)
}

pub(crate) fn blend_trust(
    private: &PrivateTrust,
    public: f64,
    params: &PersonalizedParams,
) -> AdvisorTrust {
    let evidence = match params.weight_evidence {
        WeightEvidence::Pairs => private.pairs,
        WeightEvidence::CommonSellers => private.common_sellers,
    };
    let w = (evidence as f64 / params.n_min as f64).min(1.0);
    AdvisorTrust {
        tau: w * private.trust + (1.0 - w) * public,
        evidence,
    }
}
