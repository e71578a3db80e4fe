//! The duopoly-market day loop and the robustness metric.
//!
//! Each simulated day every buyer transacts exactly once. Honest buyers visit
//! the duopoly pair with probability `duopoly_ratio`, choosing the seller their
//! trust model scores higher, and rate truthfully; attacker entities follow
//! their strategy. All of a day's decisions read the ledger as of the end of
//! the previous day, so buyer order within a day carries no information.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{attack_action, fair_rating, population_for, AttackKind, AttackParams, AttackerState};
use crate::ledger::{
    AccountId, EntityId, Honesty, LedgerError, RatingValue, RatingsLedger, SellerId, SellerTier,
};
use crate::models::{Defense, Evaluator, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub defense: Defense,
    pub attack: AttackKind,
    /// |B^H|: honest buyers.
    pub honest_buyers: u16,
    /// |B^D|: attacker entities.
    pub attackers: u16,
    /// L: simulation days.
    pub days: u16,
    /// r: share of transactions going to the duopoly pair.
    pub duopoly_ratio: f64,
    pub honest_common_sellers: u16,
    pub dishonest_common_sellers: u16,
    pub seed: u64,
    /// Count attacker transactions in the volume metric too (sensitivity
    /// option; the attacker flows to the two duopoly sellers cancel in
    /// expectation).
    pub count_attacker_transactions: bool,
    pub model: ModelParams,
    pub attack_params: AttackParams,
}

impl SimulationConfig {
    /// Testbed defaults for a (defense, attack) cell: populations follow the
    /// attack's Sybil-ness, 1+1 duopoly and 9+9 common sellers, 100 days,
    /// duopoly ratio 0.5.
    pub fn for_attack(defense: Defense, attack: AttackKind, seed: u64) -> Self {
        let (honest, attackers) = population_for(attack);
        SimulationConfig {
            defense,
            attack,
            honest_buyers: honest,
            attackers,
            days: 100,
            duopoly_ratio: 0.5,
            honest_common_sellers: 9,
            dishonest_common_sellers: 9,
            seed,
            count_attacker_transactions: false,
            model: ModelParams::default(),
            attack_params: AttackParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidConfig(what.to_string()));
        if self.honest_buyers == 0 || self.attackers == 0 {
            return bad("buyer populations must be positive");
        }
        if self.days == 0 {
            return bad("simulation needs at least one day");
        }
        if !(self.duopoly_ratio > 0.0 && self.duopoly_ratio < 1.0) {
            return bad("duopoly_ratio must lie in (0, 1)");
        }
        if self.honest_common_sellers == 0 || self.dishonest_common_sellers == 0 {
            return bad("common seller counts must be positive");
        }
        if self.attack_params.camouflage_days >= self.days {
            return bad("camouflage_days must be shorter than the horizon");
        }
        if !(self.model.brs.q > 0.0 && self.model.brs.q < 0.5) {
            return bad("brs.q must lie in (0, 0.5)");
        }
        if !(self.model.iclub.cluster_eps > 0.0 && self.model.iclub.cluster_eps < 1.0) {
            return bad("iclub.cluster_eps must lie in (0, 1)");
        }
        if self.model.iclub.local_min_transactions == 0 {
            return bad("iclub.local_min_transactions must be at least 1");
        }
        if self.model.travos.num_bins < 2 {
            return bad("travos.num_bins must be at least 2");
        }
        if self.model.personalized.n_min == 0 {
            return bad("personalized.n_min must be at least 1");
        }
        if self.model.personalized.window_days == 0 {
            return bad("personalized.window_days must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.model.combiner.epsilon) {
            return bad("combiner.epsilon must lie in [0, 1]");
        }
        Ok(())
    }

    /// Denominator of the robustness metric: `|B^H| * L * r`.
    pub fn denominator(&self) -> f64 {
        self.honest_buyers as f64 * self.days as f64 * self.duopoly_ratio
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scheduler bug: {0}")]
    Ledger(#[from] LedgerError),
}

/// Cumulative honest-buyer transaction volumes after each day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DayVolumes {
    pub day: u16,
    pub honest: u32,
    pub dishonest: u32,
}

/// Robustness of the configured defense against the configured attack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessResult {
    /// (tran_h - tran_d) / (|B^H| * L * r); +1 completely robust, -1
    /// completely vulnerable.
    pub robustness: f64,
    pub tran_honest: u32,
    pub tran_dishonest: u32,
    pub denominator: f64,
    pub series: Vec<DayVolumes>,
}

impl RobustnessResult {
    /// First day on which the dishonest duopoly seller's cumulative volume
    /// exceeds the honest one's.
    pub fn crossover_day(&self) -> Option<u16> {
        self.series
            .iter()
            .find(|v| v.dishonest > v.honest)
            .map(|v| v.day)
    }
}

/// A finished run: the metric plus the final ledger for inspection.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub result: RobustnessResult,
    pub ledger: RatingsLedger,
}

struct PlannedTx {
    entity: EntityId,
    account: AccountId,
    fresh_account: bool,
    seller: SellerId,
    value: RatingValue,
    by_honest: bool,
}

/// One live simulation. `run_day` advances a single day; `finish` returns the
/// metric once all days have run.
pub struct Simulation {
    config: SimulationConfig,
    ledger: RatingsLedger,
    honest_accounts: Vec<AccountId>,
    attacker_states: Vec<AttackerState>,
    rng: ChaCha8Rng,
    duopoly_honest: SellerId,
    duopoly_dishonest: SellerId,
    common_sellers: Vec<SellerId>,
    tran_honest: u32,
    tran_dishonest: u32,
    series: Vec<DayVolumes>,
    next_day: u16,
}

impl Simulation {
    pub fn new(config: SimulationConfig) -> Result<Self, SimError> {
        config.validate()?;
        let mut ledger = RatingsLedger::new(config.days);
        let duopoly_honest = ledger.add_seller(Honesty::Honest, SellerTier::DuopolyHonest)?;
        let duopoly_dishonest = ledger.add_seller(Honesty::Dishonest, SellerTier::DuopolyDishonest)?;
        let mut common_sellers = Vec::new();
        for _ in 0..config.honest_common_sellers {
            common_sellers.push(ledger.add_seller(Honesty::Honest, SellerTier::Common)?);
        }
        for _ in 0..config.dishonest_common_sellers {
            common_sellers.push(ledger.add_seller(Honesty::Dishonest, SellerTier::Common)?);
        }

        let mut honest_accounts = Vec::new();
        for _ in 0..config.honest_buyers {
            let e = ledger.register_entity(Honesty::Honest, None)?;
            honest_accounts.push(ledger.spawn_account(e, 0)?);
        }
        let mut attacker_states = Vec::new();
        for _ in 0..config.attackers {
            let e = ledger.register_entity(Honesty::Dishonest, Some(config.attack))?;
            let account = ledger.spawn_account(e, 0)?;
            attacker_states.push(AttackerState {
                entity: e,
                account,
                camouflage_end_day: config.attack_params.camouflage_days,
            });
        }

        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Simulation {
            config,
            ledger,
            honest_accounts,
            attacker_states,
            rng,
            duopoly_honest,
            duopoly_dishonest,
            common_sellers,
            tran_honest: 0,
            tran_dishonest: 0,
            series: Vec::new(),
            next_day: 1,
        })
    }

    pub fn ledger(&self) -> &RatingsLedger {
        &self.ledger
    }

    pub fn day(&self) -> u16 {
        self.next_day.saturating_sub(1)
    }

    pub fn finished(&self) -> bool {
        self.next_day > self.config.days
    }

    /// Run one day: plan every buyer's transaction against yesterday's ledger,
    /// then append all ratings and update the volume counters.
    pub fn run_day(&mut self) -> Result<(), SimError> {
        let day = self.next_day;
        assert!(day <= self.config.days, "simulation already finished");

        let mut planned: Vec<PlannedTx> = Vec::with_capacity(
            self.honest_accounts.len() + self.attacker_states.len(),
        );
        {
            let evaluator = Evaluator::new(&self.ledger, self.config.defense, &self.config.model);
            let rng = &mut self.rng;
            // Honest buyers first, then attackers: rng draws in roster order.
            for &account in &self.honest_accounts {
                let seller = if rng.gen_bool(self.config.duopoly_ratio) {
                    let rep_h = evaluator.reputation(account, self.duopoly_honest);
                    let rep_d = evaluator.reputation(account, self.duopoly_dishonest);
                    if rep_h > rep_d {
                        self.duopoly_honest
                    } else if rep_d > rep_h {
                        self.duopoly_dishonest
                    } else if rng.gen_bool(0.5) {
                        self.duopoly_honest
                    } else {
                        self.duopoly_dishonest
                    }
                } else {
                    self.common_sellers[rng.gen_range(0..self.common_sellers.len())]
                };
                planned.push(PlannedTx {
                    entity: self.ledger.account(account).owner,
                    account,
                    fresh_account: false,
                    seller,
                    value: fair_rating(&self.ledger, seller),
                    by_honest: true,
                });
            }
            for state in &self.attacker_states {
                let act = attack_action(
                    self.config.attack,
                    day,
                    &self.ledger,
                    &self.config.attack_params,
                    self.config.duopoly_ratio,
                    rng,
                );
                planned.push(PlannedTx {
                    entity: state.entity,
                    account: state.account,
                    fresh_account: act.fresh_account,
                    seller: act.seller,
                    value: act.value,
                    by_honest: false,
                });
            }
        }

        for tx in planned {
            let account = if tx.fresh_account && !self.ledger.account_history(tx.account).is_empty()
            {
                let fresh = self.ledger.spawn_account(tx.entity, day)?;
                let state = self
                    .attacker_states
                    .iter_mut()
                    .find(|s| s.entity == tx.entity)
                    .expect("attacker state exists");
                state.account = fresh;
                fresh
            } else {
                tx.account
            };
            self.ledger.record_transaction(account, tx.seller, day, tx.value)?;

            let counted = tx.by_honest || self.config.count_attacker_transactions;
            if counted {
                if tx.seller == self.duopoly_honest {
                    self.tran_honest += 1;
                } else if tx.seller == self.duopoly_dishonest {
                    self.tran_dishonest += 1;
                }
            }
        }

        self.series.push(DayVolumes {
            day,
            honest: self.tran_honest,
            dishonest: self.tran_dishonest,
        });
        self.next_day += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<SimulationRun, SimError> {
        while !self.finished() {
            self.run_day()?;
        }
        let denominator = self.config.denominator();
        let result = RobustnessResult {
            robustness: (self.tran_honest as f64 - self.tran_dishonest as f64) / denominator,
            tran_honest: self.tran_honest,
            tran_dishonest: self.tran_dishonest,
            denominator,
            series: self.series,
        };
        Ok(SimulationRun {
            result,
            ledger: self.ledger,
        })
    }
}

/// Run a full simulation from a fresh market. Identical configurations
/// (including the seed) produce bit-identical ledgers and results.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationRun, SimError> {
    Simulation::new(config.clone())?.finish()
}
