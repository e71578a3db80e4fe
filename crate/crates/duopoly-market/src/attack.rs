//! The six unfair-rating attack strategies.
//!
//! Each strategy decides, per attacker entity per day, which seller to visit,
//! whether to use a fresh account, and what rating to emit. Attackers never
//! consult trust models; their seller choice is purely stochastic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ledger::{AccountId, EntityId, Honesty, RatingValue, RatingsLedger, SellerId, SellerTier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    Constant,
    Camouflage,
    Whitewashing,
    Sybil,
    SybilCamouflage,
    SybilWhitewashing,
}

impl AttackKind {
    pub const ALL: [AttackKind; 6] = [
        AttackKind::Constant,
        AttackKind::Camouflage,
        AttackKind::Whitewashing,
        AttackKind::Sybil,
        AttackKind::SybilCamouflage,
        AttackKind::SybilWhitewashing,
    ];

    /// Sybil-based attacks put the attackers in the strict majority.
    pub fn is_sybil(self) -> bool {
        matches!(
            self,
            AttackKind::Sybil | AttackKind::SybilCamouflage | AttackKind::SybilWhitewashing
        )
    }

    pub fn is_camouflage(self) -> bool {
        matches!(self, AttackKind::Camouflage | AttackKind::SybilCamouflage)
    }

    pub fn is_whitewashing(self) -> bool {
        matches!(self, AttackKind::Whitewashing | AttackKind::SybilWhitewashing)
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AttackKind::Constant => "Constant",
            AttackKind::Camouflage => "Camouflage",
            AttackKind::Whitewashing => "Whitewashing",
            AttackKind::Sybil => "Sybil",
            AttackKind::SybilCamouflage => "SybilCamouflage",
            AttackKind::SybilWhitewashing => "SybilWhitewashing",
        };
        f.write_str(name)
    }
}

impl FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "constant" => Ok(AttackKind::Constant),
            "camouflage" => Ok(AttackKind::Camouflage),
            "whitewashing" | "ww" => Ok(AttackKind::Whitewashing),
            "sybil" => Ok(AttackKind::Sybil),
            "sybilcamouflage" | "sybilcam" => Ok(AttackKind::SybilCamouflage),
            "sybilwhitewashing" | "sybilww" => Ok(AttackKind::SybilWhitewashing),
            _ => Err(format!(
                "unknown attack '{s}' (expected one of: Constant, Camouflage, Whitewashing, \
                 Sybil, SybilCamouflage, SybilWhitewashing)"
            )),
        }
    }
}

/// Honest/attacker population sizes for an attack kind. The attackers are the
/// strict minority under Non-Sybil-based attacks and the strict majority under
/// Sybil-based ones.
pub fn population_for(kind: AttackKind) -> (u16, u16) {
    if kind.is_sybil() {
        (6, 14)
    } else {
        (14, 6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    /// Length of the fair-rating phase for camouflage attacks.
    pub camouflage_days: u16,
    /// Whitewashers spend every account on a duopoly seller. When false they
    /// pick sellers like a Constant attacker instead.
    pub ww_duopoly_only: bool,
}

impl Default for AttackParams {
    fn default() -> Self {
        AttackParams {
            camouflage_days: 20,
            ww_duopoly_only: true,
        }
    }
}

/// Per-entity attacker bookkeeping owned by the day loop.
#[derive(Debug, Clone)]
pub struct AttackerState {
    pub entity: EntityId,
    pub account: AccountId,
    pub camouflage_end_day: u16,
}

/// One planned attacker transaction. `fresh_account` asks the scheduler to
/// retire the current account and spawn a new one for this rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedAttack {
    pub seller: SellerId,
    pub value: RatingValue,
    pub fresh_account: bool,
}

/// Unfair rating: positive iff the seller is dishonest.
fn unfair_rating(ledger: &RatingsLedger, seller: SellerId) -> RatingValue {
    match ledger.seller_honesty(seller) {
        Honesty::Dishonest => RatingValue::Positive,
        Honesty::Honest => RatingValue::Negative,
    }
}

/// Fair rating: positive iff the seller is honest.
pub fn fair_rating(ledger: &RatingsLedger, seller: SellerId) -> RatingValue {
    match ledger.seller_honesty(seller) {
        Honesty::Honest => RatingValue::Positive,
        Honesty::Dishonest => RatingValue::Negative,
    }
}

fn uniform_common<R: Rng>(ledger: &RatingsLedger, rng: &mut R) -> SellerId {
    let commons: Vec<SellerId> = ledger
        .sellers()
        .iter()
        .filter(|s| s.tier == SellerTier::Common)
        .map(|s| s.id)
        .collect();
    commons[rng.gen_range(0..commons.len())]
}

fn uniform_duopoly<R: Rng>(ledger: &RatingsLedger, rng: &mut R) -> SellerId {
    let pair: Vec<SellerId> = ledger
        .sellers()
        .iter()
        .filter(|s| s.tier != SellerTier::Common)
        .map(|s| s.id)
        .collect();
    pair[rng.gen_range(0..pair.len())]
}

/// Constant-attack seller choice: a duopoly seller with probability
/// `duopoly_ratio` (uniform between the two), otherwise a uniform common seller.
fn constant_choice<R: Rng>(ledger: &RatingsLedger, duopoly_ratio: f64, rng: &mut R) -> SellerId {
    if rng.gen_bool(duopoly_ratio) {
        uniform_duopoly(ledger, rng)
    } else {
        uniform_common(ledger, rng)
    }
}

/// Decide one attacker transaction for this day.
pub fn attack_action<R: Rng>(
    kind: AttackKind,
    day: u16,
    ledger: &RatingsLedger,
    params: &AttackParams,
    duopoly_ratio: f64,
    rng: &mut R,
) -> PlannedAttack {
    match kind {
        AttackKind::Constant | AttackKind::Sybil => {
            let seller = constant_choice(ledger, duopoly_ratio, rng);
            PlannedAttack {
                seller,
                value: unfair_rating(ledger, seller),
                fresh_account: false,
            }
        }
        AttackKind::Camouflage | AttackKind::SybilCamouflage => {
            if day <= params.camouflage_days {
                // Build up trust first: fair ratings, common sellers only.
                let seller = uniform_common(ledger, rng);
                PlannedAttack {
                    seller,
                    value: fair_rating(ledger, seller),
                    fresh_account: false,
                }
            } else {
                let seller = constant_choice(ledger, duopoly_ratio, rng);
                PlannedAttack {
                    seller,
                    value: unfair_rating(ledger, seller),
                    fresh_account: false,
                }
            }
        }
        AttackKind::Whitewashing | AttackKind::SybilWhitewashing => {
            let seller = if params.ww_duopoly_only {
                uniform_duopoly(ledger, rng)
            } else {
                constant_choice(ledger, duopoly_ratio, rng)
            };
            PlannedAttack {
                seller,
                value: unfair_rating(ledger, seller),
                fresh_account: true,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn roster() -> RatingsLedger {
        let mut ledger = RatingsLedger::new(100);
        ledger.add_seller(Honesty::Honest, SellerTier::DuopolyHonest).unwrap();
        ledger.add_seller(Honesty::Dishonest, SellerTier::DuopolyDishonest).unwrap();
        for _ in 0..9 {
            ledger.add_seller(Honesty::Honest, SellerTier::Common).unwrap();
        }
        for _ in 0..9 {
            ledger.add_seller(Honesty::Dishonest, SellerTier::Common).unwrap();
        }
        ledger
    }

    #[test]
    fn populations() {
        assert_eq!(population_for(AttackKind::Constant), (14, 6));
        assert_eq!(population_for(AttackKind::Camouflage), (14, 6));
        assert_eq!(population_for(AttackKind::Whitewashing), (14, 6));
        assert_eq!(population_for(AttackKind::Sybil), (6, 14));
        assert_eq!(population_for(AttackKind::SybilCamouflage), (6, 14));
        assert_eq!(population_for(AttackKind::SybilWhitewashing), (6, 14));
    }

    #[test]
    fn constant_ratings_are_always_unfair() {
        let ledger = roster();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = AttackParams::default();
        for day in 1..=200 {
            let act = attack_action(AttackKind::Constant, day % 100 + 1, &ledger, &params, 0.5, &mut rng);
            let expected = match ledger.seller_honesty(act.seller) {
                Honesty::Dishonest => RatingValue::Positive,
                Honesty::Honest => RatingValue::Negative,
            };
            assert_eq!(act.value, expected);
            assert!(!act.fresh_account);
        }
    }

    #[test]
    fn camouflage_phase_is_fair_and_common_only() {
        let ledger = roster();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = AttackParams {
            camouflage_days: 30,
            ..AttackParams::default()
        };
        for _ in 0..100 {
            let act = attack_action(AttackKind::SybilCamouflage, 30, &ledger, &params, 0.5, &mut rng);
            assert_eq!(
                ledger.sellers()[act.seller.0 as usize].tier,
                SellerTier::Common
            );
            let fair = match ledger.seller_honesty(act.seller) {
                Honesty::Honest => RatingValue::Positive,
                Honesty::Dishonest => RatingValue::Negative,
            };
            assert_eq!(act.value, fair);
        }
        // Day after the phase ends: back to unfair ratings.
        let act = attack_action(AttackKind::SybilCamouflage, 31, &ledger, &params, 1.0, &mut rng);
        let unfair = match ledger.seller_honesty(act.seller) {
            Honesty::Dishonest => RatingValue::Positive,
            Honesty::Honest => RatingValue::Negative,
        };
        assert_eq!(act.value, unfair);
    }

    #[test]
    fn whitewashers_request_a_fresh_account_every_day() {
        let ledger = roster();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = AttackParams::default();
        for day in 1..=50 {
            let act = attack_action(AttackKind::Whitewashing, day, &ledger, &params, 0.5, &mut rng);
            assert!(act.fresh_account);
            assert!(
                ledger.sellers()[act.seller.0 as usize].tier != SellerTier::Common,
                "duopoly-only whitewashers stay on the duopoly pair"
            );
        }
    }

    #[test]
    fn attack_names_round_trip() {
        for kind in AttackKind::ALL {
            assert_eq!(kind.to_string().parse::<AttackKind>().unwrap(), kind);
        }
        assert_eq!("sybil ww".parse::<AttackKind>().unwrap(), AttackKind::SybilWhitewashing);
        assert_eq!("sybil-camouflage".parse::<AttackKind>().unwrap(), AttackKind::SybilCamouflage);
        assert!("bogus".parse::<AttackKind>().is_err());
    }
}
