//! Trust models: the two Filtering-based defenses (BRS, iCLUB), the two
//! Discounting-based defenses (TRAVOS, Personalized), and the two pipelines
//! for combining one model of each category.

pub mod combine;
pub mod discounting;
pub mod eval;
pub mod filtering;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ledger::AccountId;

pub use combine::CombinerParams;
pub use discounting::{AdvisorTrust, PersonalizedParams, TravosParams};
pub use eval::Evaluator;
pub use filtering::{BrsParams, IclubParams};

/// Advisors whose ratings survive a filtering model for one evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HonestSet {
    /// Surviving advisor accounts, sorted by id.
    pub advisors: Vec<AccountId>,
    /// iCLUB local knowledge also aggregates the buyer's own ratings.
    pub includes_buyer: bool,
}

impl HonestSet {
    pub fn contains(&self, account: AccountId) -> bool {
        self.advisors.binary_search(&account).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingleModel {
    Brs,
    Iclub,
    Travos,
    Personalized,
}

impl SingleModel {
    pub const ALL: [SingleModel; 4] = [
        SingleModel::Brs,
        SingleModel::Iclub,
        SingleModel::Travos,
        SingleModel::Personalized,
    ];

    pub fn is_filtering(self) -> bool {
        matches!(self, SingleModel::Brs | SingleModel::Iclub)
    }

    pub fn name(self) -> &'static str {
        match self {
            SingleModel::Brs => "BRS",
            SingleModel::Iclub => "iCLUB",
            SingleModel::Travos => "TRAVOS",
            SingleModel::Personalized => "Personalized",
        }
    }
}

impl FromStr for SingleModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "brs" => Ok(SingleModel::Brs),
            "iclub" => Ok(SingleModel::Iclub),
            "travos" => Ok(SingleModel::Travos),
            "personalized" => Ok(SingleModel::Personalized),
            _ => Err(format!(
                "unknown model '{s}' (expected one of: BRS, iCLUB, TRAVOS, Personalized)"
            )),
        }
    }
}

/// A defense selection: a single trust model or a combination of one
/// Filtering-based and one Discounting-based model. Combination names follow
/// the order the two models are applied, e.g. `BRS+TRAVOS` filters first while
/// `TRAVOS+BRS` discounts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Defense {
    Single(SingleModel),
    FilterThenDiscount { filter: SingleModel, discount: SingleModel },
    DiscountThenFilter { discount: SingleModel, filter: SingleModel },
}

impl Defense {
    /// The four singles followed by the eight two-stage combinations.
    pub fn all() -> Vec<Defense> {
        let mut out: Vec<Defense> = SingleModel::ALL.into_iter().map(Defense::Single).collect();
        for f in [SingleModel::Brs, SingleModel::Iclub] {
            for d in [SingleModel::Travos, SingleModel::Personalized] {
                out.push(Defense::FilterThenDiscount { filter: f, discount: d });
            }
        }
        for d in [SingleModel::Travos, SingleModel::Personalized] {
            for f in [SingleModel::Brs, SingleModel::Iclub] {
                out.push(Defense::DiscountThenFilter { discount: d, filter: f });
            }
        }
        out
    }
}

impl fmt::Display for Defense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defense::Single(m) => f.write_str(m.name()),
            Defense::FilterThenDiscount { filter, discount } => {
                write!(f, "{}+{}", filter.name(), discount.name())
            }
            Defense::DiscountThenFilter { discount, filter } => {
                write!(f, "{}+{}", discount.name(), filter.name())
            }
        }
    }
}

impl FromStr for Defense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('+') {
            None => Ok(Defense::Single(s.parse()?)),
            Some((first, second)) => {
                let a: SingleModel = first.parse()?;
                let b: SingleModel = second.parse()?;
                match (a.is_filtering(), b.is_filtering()) {
                    (true, false) => Ok(Defense::FilterThenDiscount { filter: a, discount: b }),
                    (false, true) => Ok(Defense::DiscountThenFilter { discount: a, filter: b }),
                    _ => Err(format!(
                        "combination '{s}' must pair one Filtering-based model (BRS, iCLUB) \
                         with one Discounting-based model (TRAVOS, Personalized)"
                    )),
                }
            }
        }
    }
}

/// Every tunable model parameter, bundled so a whole experiment can be
/// described by one flat document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelParams {
    pub brs: BrsParams,
    pub iclub: IclubParams,
    pub travos: TravosParams,
    pub personalized: PersonalizedParams,
    pub combiner: CombinerParams,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defense_names_round_trip() {
        for d in Defense::all() {
            assert_eq!(d.to_string().parse::<Defense>().unwrap(), d);
        }
    }

    #[test]
    fn combination_order_decides_pipeline() {
        assert_eq!(
            "BRS+TRAVOS".parse::<Defense>().unwrap(),
            Defense::FilterThenDiscount {
                filter: SingleModel::Brs,
                discount: SingleModel::Travos
            }
        );
        assert_eq!(
            "TRAVOS+BRS".parse::<Defense>().unwrap(),
            Defense::DiscountThenFilter {
                discount: SingleModel::Travos,
                filter: SingleModel::Brs
            }
        );
    }

    #[test]
    fn invalid_combinations_rejected() {
        assert!("BRS+iCLUB".parse::<Defense>().is_err());
        assert!("TRAVOS+Personalized".parse::<Defense>().is_err());
        assert!("BRS+bogus".parse::<Defense>().is_err());
    }

    #[test]
    fn twelve_defenses_total() {
        assert_eq!(Defense::all().len(), 12);
    }
}
