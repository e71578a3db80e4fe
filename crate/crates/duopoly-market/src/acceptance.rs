//! Release gate: the robustness tables the artifact must reproduce plus the
//! property-level checks, each reported as one pass/fail line.
//!
//! The quantitative checks replay the full (defense x attack) matrix at the
//! configured number of seeded runs and compare every cell against its
//! expected band. The property checks are runnable on their own and do not
//! depend on table reproduction.

use crate::attack::AttackKind;
use crate::beta::beta_cdf;
use crate::experiment::{collect_series, run_matrix, ExperimentSpec, MatrixResult};
use crate::ledger::RatingAggregate;
use crate::models::discounting::discounted_reputation;
use crate::models::{Defense, SingleModel};
use crate::sim::{run_simulation, SimulationConfig};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}{}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" — {}", self.detail)
            }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AcceptanceOptions {
    pub runs: u32,
    pub base_seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions { runs: 50, base_seed: 0 }
    }
}

/// Run all acceptance criteria and return one result per criterion.
pub fn run_all(opts: AcceptanceOptions) -> Vec<CriterionResult> {
    let spec = ExperimentSpec::full_matrix(opts.base_seed);
    let spec = ExperimentSpec { runs: opts.runs, ..spec };
    let matrix = run_matrix(&spec).expect("matrix runs");

    let mut results = vec![
        criterion_brs(&matrix),
        criterion_travos(&matrix),
        criterion_personalized(&matrix),
        criterion_iclub(&matrix),
        criterion_discount_then_filter(&matrix),
        criterion_filter_then_discount(&matrix),
        criterion_brs_whitewashing_crossover(&spec),
        criterion_beta_oracle(),
        criterion_discount_spot_values(),
        criterion_determinism(),
        criterion_invariants(),
        criterion_brs_fixture(),
    ];
    results.sort_by_key(|r| r.id);
    results
}

pub fn format_report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.line());
        out.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    out
}

// ---------------------------------------------------------------------------
// table-band helpers

struct Bands<'m> {
    matrix: &'m MatrixResult,
    failures: Vec<String>,
}

impl<'m> Bands<'m> {
    fn new(matrix: &'m MatrixResult) -> Self {
        Bands { matrix, failures: Vec::new() }
    }

    fn mean(&self, defense: Defense, attack: AttackKind) -> f64 {
        self.matrix.cell(defense, attack).expect("cell in matrix").mean
    }

    fn std(&self, defense: Defense, attack: AttackKind) -> f64 {
        self.matrix.cell(defense, attack).expect("cell in matrix").std
    }

    /// Mean within ±tol of the expected value and matching its sign.
    fn near(&mut self, defense: Defense, attack: AttackKind, expected: f64, tol: f64) {
        let mean = self.mean(defense, attack);
        if (mean - expected).abs() > tol || mean.signum() != expected.signum() {
            self.failures.push(format!(
                "{defense}/{attack}: mean {mean:.2} not within ±{tol:.2} of {expected:.2}"
            ));
        }
    }

    fn at_least(&mut self, defense: Defense, attack: AttackKind, min: f64) {
        let mean = self.mean(defense, attack);
        if mean < min {
            self.failures.push(format!(
                "{defense}/{attack}: mean {mean:.2} below {min:.2}"
            ));
        }
    }

    fn negative(&mut self, defense: Defense, attack: AttackKind) {
        let mean = self.mean(defense, attack);
        if mean >= 0.0 {
            self.failures.push(format!(
                "{defense}/{attack}: mean {mean:.2} not negative"
            ));
        }
    }

    fn unstable_between(&mut self, defense: Defense, attack: AttackKind, lo: f64, hi: f64, min_std: f64) {
        let mean = self.mean(defense, attack);
        let std = self.std(defense, attack);
        if !(lo..=hi).contains(&mean) {
            self.failures.push(format!(
                "{defense}/{attack}: mean {mean:.2} outside [{lo:.2}, {hi:.2}]"
            ));
        }
        if std < min_std {
            self.failures.push(format!(
                "{defense}/{attack}: std {std:.2} below {min_std:.2}"
            ));
        }
    }

    fn finish(self, id: u32, name: &'static str) -> CriterionResult {
        CriterionResult {
            id,
            name,
            passed: self.failures.is_empty(),
            detail: self.failures.join("; "),
        }
    }
}

fn single(m: SingleModel) -> Defense {
    Defense::Single(m)
}

fn ftd(filter: SingleModel, discount: SingleModel) -> Defense {
    Defense::FilterThenDiscount { filter, discount }
}

fn dtf(discount: SingleModel, filter: SingleModel) -> Defense {
    Defense::DiscountThenFilter { discount, filter }
}

// ---------------------------------------------------------------------------
// criteria 1-6: table reproduction

fn criterion_brs(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    let brs = single(SingleModel::Brs);
    b.near(brs, AttackKind::Constant, 0.84, 0.15);
    b.near(brs, AttackKind::Camouflage, 0.87, 0.15);
    b.near(brs, AttackKind::Whitewashing, -0.48, 0.15);
    b.near(brs, AttackKind::Sybil, -0.98, 0.15);
    b.near(brs, AttackKind::SybilCamouflage, -0.63, 0.15);
    b.near(brs, AttackKind::SybilWhitewashing, -0.60, 0.15);
    b.finish(1, "BRS single-model robustness row")
}

fn criterion_travos(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    let travos = single(SingleModel::Travos);
    b.near(travos, AttackKind::Constant, 0.96, 0.15);
    b.near(travos, AttackKind::Whitewashing, 0.98, 0.15);
    b.near(travos, AttackKind::Sybil, 0.66, 0.15);
    b.near(travos, AttackKind::SybilCamouflage, -0.60, 0.15);
    b.near(travos, AttackKind::SybilWhitewashing, -1.00, 0.15);
    b.finish(2, "TRAVOS single-model robustness row")
}

fn criterion_personalized(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    let pers = single(SingleModel::Personalized);
    b.at_least(pers, AttackKind::Constant, 0.95);
    b.at_least(pers, AttackKind::Camouflage, 0.95);
    b.at_least(pers, AttackKind::Whitewashing, 0.95);
    b.near(pers, AttackKind::Sybil, 0.84, 0.2);
    b.near(pers, AttackKind::SybilCamouflage, 0.67, 0.2);
    b.near(pers, AttackKind::SybilWhitewashing, -1.00, 0.15);
    b.finish(3, "Personalized single-model robustness row")
}

fn criterion_iclub(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    let iclub = single(SingleModel::Iclub);
    b.at_least(iclub, AttackKind::Constant, 0.8);
    b.at_least(iclub, AttackKind::Camouflage, 0.8);
    b.at_least(iclub, AttackKind::SybilCamouflage, 0.8);
    b.at_least(iclub, AttackKind::Whitewashing, 0.6);
    b.unstable_between(iclub, AttackKind::Sybil, -0.5, 0.4, 0.15);
    b.unstable_between(iclub, AttackKind::SybilWhitewashing, -0.5, 0.4, 0.15);
    b.finish(4, "iCLUB single-model robustness row (qualitative)")
}

fn criterion_discount_then_filter(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    for defense in [
        dtf(SingleModel::Travos, SingleModel::Iclub),
        dtf(SingleModel::Personalized, SingleModel::Brs),
        dtf(SingleModel::Personalized, SingleModel::Iclub),
    ] {
        for attack in AttackKind::ALL {
            b.at_least(defense, attack, 0.8);
        }
    }
    let tb = dtf(SingleModel::Travos, SingleModel::Brs);
    for attack in [
        AttackKind::Constant,
        AttackKind::Camouflage,
        AttackKind::Whitewashing,
        AttackKind::Sybil,
        AttackKind::SybilWhitewashing,
    ] {
        b.at_least(tb, attack, 0.8);
    }
    b.negative(tb, AttackKind::SybilCamouflage);
    b.finish(5, "Discount-then-Filter combination rows")
}

fn criterion_filter_then_discount(matrix: &MatrixResult) -> CriterionResult {
    let mut b = Bands::new(matrix);
    for defense in [
        ftd(SingleModel::Brs, SingleModel::Travos),
        ftd(SingleModel::Brs, SingleModel::Personalized),
    ] {
        for attack in [
            AttackKind::Whitewashing,
            AttackKind::Sybil,
            AttackKind::SybilCamouflage,
            AttackKind::SybilWhitewashing,
        ] {
            b.negative(defense, attack);
        }
    }
    for defense in [
        ftd(SingleModel::Iclub, SingleModel::Travos),
        ftd(SingleModel::Iclub, SingleModel::Personalized),
    ] {
        for attack in AttackKind::ALL {
            b.at_least(defense, attack, 0.6);
        }
    }
    b.finish(6, "Filter-then-Discount combination rows")
}

// ---------------------------------------------------------------------------
// criterion 7: BRS vs Whitewashing crossover dynamics

fn criterion_brs_whitewashing_crossover(spec: &ExperimentSpec) -> CriterionResult {
    let runs = collect_series(spec, single(SingleModel::Brs), AttackKind::Whitewashing)
        .expect("series collection");
    let days = runs[0].len();
    let mut mean_h = vec![0.0f64; days];
    let mut mean_d = vec![0.0f64; days];
    for series in &runs {
        for (i, v) in series.iter().enumerate() {
            mean_h[i] += v.honest as f64;
            mean_d[i] += v.dishonest as f64;
        }
    }
    for i in 0..days {
        mean_h[i] /= runs.len() as f64;
        mean_d[i] /= runs.len() as f64;
    }

    let early_lead = mean_h[14] > mean_d[14];
    let crossover = (0..days).find(|&i| mean_d[i] > mean_h[i]).map(|i| i + 1);
    let passed = early_lead && crossover.is_some_and(|day| (25..=70).contains(&day));
    CriterionResult {
        id: 7,
        name: "BRS vs Whitewashing: honest leads early, dishonest overtakes mid-run",
        passed,
        detail: format!(
            "day-15 lead: honest {:.0} vs dishonest {:.0}; crossover {}",
            mean_h[14],
            mean_d[14],
            crossover.map_or("never".to_string(), |d| format!("day {d}")),
        ),
    }
}

// ---------------------------------------------------------------------------
// criterion 8: independent quadrature oracle for the beta CDF

/// Adaptive Simpson integration over a forced base grid. The base split keeps
/// narrow peaks from slipping between the probe points of a single panel; each
/// base panel is then refined with the classic Richardson-corrected rule.
fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, lo: f64, hi: f64) -> f64 {
    fn simpson3(w: f64, flo: f64, fmid: f64, fhi: f64) -> f64 {
        w / 6.0 * (flo + 4.0 * fmid + fhi)
    }
    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64 + Copy>(
        f: F,
        lo: f64,
        hi: f64,
        flo: f64,
        fmid: f64,
        fhi: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let mid = 0.5 * (lo + hi);
        let lmid = 0.5 * (lo + mid);
        let rmid = 0.5 * (mid + hi);
        let flmid = f(lmid);
        let frmid = f(rmid);
        let left = simpson3(mid - lo, flo, flmid, fmid);
        let right = simpson3(hi - mid, fmid, frmid, fhi);
        let total = left + right;
        if depth == 0 || (total - whole).abs() <= 15.0 * tol {
            total + (total - whole) / 15.0
        } else {
            refine(f, lo, mid, flo, flmid, fmid, left, tol / 2.0, depth - 1)
                + refine(f, mid, hi, fmid, frmid, fhi, right, tol / 2.0, depth - 1)
        }
    }

    if hi <= lo {
        return 0.0;
    }
    const BASE_PANELS: u32 = 64;
    let width = (hi - lo) / BASE_PANELS as f64;
    let mut sum = 0.0;
    for i in 0..BASE_PANELS {
        let a = lo + i as f64 * width;
        let b = a + width;
        let mid = 0.5 * (a + b);
        let (fa, fmid, fb) = (f(a), f(mid), f(b));
        let whole = simpson3(width, fa, fmid, fb);
        sum += refine(f, a, b, fa, fmid, fb, whole, 1e-14 * width.max(1e-6), 32);
    }
    sum
}

/// Regularized beta CDF by numeric quadrature of the unnormalized density.
/// Shares no code with the continued-fraction implementation.
pub fn quadrature_cdf(x: f64, a: f64, b: f64) -> f64 {
    // Peak-relative scaling keeps the integrand in a comfortable range for
    // large exponents.
    let mode = if a + b > 2.0 { (a - 1.0) / (a + b - 2.0) } else { 0.5 };
    let ln_peak = if a > 1.0 || b > 1.0 {
        (a - 1.0) * mode.max(1e-300).ln() + (b - 1.0) * (1.0 - mode).max(1e-300).ln()
    } else {
        0.0
    };
    let pdf = move |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            if (t <= 0.0 && a > 1.0) || (t >= 1.0 && b > 1.0) {
                return 0.0;
            }
        }
        ((a - 1.0) * t.max(1e-300).ln() + (b - 1.0) * (1.0 - t).max(1e-300).ln() - ln_peak).exp()
    };
    let partial = simpson(pdf, 0.0, x);
    let total = partial + simpson(pdf, x, 1.0);
    partial / total
}

fn criterion_beta_oracle() -> CriterionResult {
    let mut max_err = 0.0f64;
    let mut worst = (0u32, 0u32, 0.0f64);
    for a in 1..=50u32 {
        for b in 1..=50u32 {
            for i in 1..=9 {
                let x = i as f64 / 10.0;
                let got = beta_cdf(x, a as f64, b as f64).expect("in domain");
                let want = quadrature_cdf(x, a as f64, b as f64);
                let err = (got - want).abs();
                if err > max_err {
                    max_err = err;
                    worst = (a, b, x);
                }
            }
        }
    }
    CriterionResult {
        id: 8,
        name: "beta CDF matches the quadrature oracle to 1e-8",
        passed: max_err <= 1e-8,
        detail: format!(
            "max abs error {max_err:.2e} at (a={}, b={}, x={})",
            worst.0, worst.1, worst.2
        ),
    }
}

// ---------------------------------------------------------------------------
// criterion 9: discounted-aggregation spot values

fn criterion_discount_spot_values() -> CriterionResult {
    let honest_seller = discounted_reputation(
        std::iter::repeat_n((0.6, RatingAggregate { p: 1, n: 0 }), 6)
            .chain(std::iter::repeat_n((0.4, RatingAggregate { p: 0, n: 1 }), 14)),
    );
    let dishonest_seller = discounted_reputation(
        std::iter::repeat_n((0.4, RatingAggregate { p: 1, n: 0 }), 14)
            .chain(std::iter::repeat_n((0.6, RatingAggregate { p: 0, n: 1 }), 6)),
    );
    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    let passed = round2(honest_seller) == 0.41 && round2(dishonest_seller) == 0.59;
    CriterionResult {
        id: 9,
        name: "soft-punishment spot values 0.41 / 0.59 reproduced to 2 decimals",
        passed,
        detail: format!("got {honest_seller:.4} and {dishonest_seller:.4}"),
    }
}

// ---------------------------------------------------------------------------
// criterion 10: determinism

fn criterion_determinism() -> CriterionResult {
    let mut failures = Vec::new();
    for (defense, attack) in [
        (single(SingleModel::Brs), AttackKind::Whitewashing),
        (single(SingleModel::Personalized), AttackKind::Sybil),
        (
            dtf(SingleModel::Travos, SingleModel::Iclub),
            AttackKind::SybilCamouflage,
        ),
    ] {
        let cfg = SimulationConfig::for_attack(defense, attack, 42);
        let a = run_simulation(&cfg).expect("runs");
        let b = run_simulation(&cfg).expect("runs");
        if a.ledger.to_line_format() != b.ledger.to_line_format() {
            failures.push(format!("{defense}/{attack}: ledgers differ"));
        }
        if a.result != b.result {
            failures.push(format!("{defense}/{attack}: results differ"));
        }
    }

    // Parallelism degree must not affect matrix values.
    let mut spec = ExperimentSpec::new(
        vec![single(SingleModel::Brs)],
        vec![AttackKind::Constant, AttackKind::Sybil],
        4,
        7,
    );
    spec.template.days = 30;
    let wide = run_matrix(&spec).expect("matrix runs");
    let narrow = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(|| run_matrix(&spec).expect("matrix runs"));
    if wide.values != narrow.values {
        failures.push("values depend on parallelism degree".to_string());
    }

    CriterionResult {
        id: 10,
        name: "identical seeds give bit-identical runs at any parallelism degree",
        passed: failures.is_empty(),
        detail: failures.join("; "),
    }
}

// ---------------------------------------------------------------------------
// criterion 11: invariant suites over full runs

fn criterion_invariants() -> CriterionResult {
    use crate::ledger::{Honesty, RatingValue, SellerTier};
    let mut failures = Vec::new();

    for attack in AttackKind::ALL {
        let cfg = SimulationConfig::for_attack(single(SingleModel::Brs), attack, 11);
        let camouflage_days = cfg.attack_params.camouflage_days;
        let run = run_simulation(&cfg).expect("runs");
        let ledger = &run.ledger;

        // Per-day uniqueness.
        let mut seen = std::collections::HashSet::new();
        for r in ledger.ratings() {
            if !seen.insert((r.account, r.day)) {
                failures.push(format!("{attack}: duplicate (account, day)"));
                break;
            }
        }

        // Rating-fairness rules per role and phase.
        for r in ledger.ratings() {
            let owner = ledger.account(r.account).owner;
            let dishonest_rater = ledger.entities()[owner.0 as usize].honesty == Honesty::Dishonest;
            let fair = match ledger.seller_honesty(r.seller) {
                Honesty::Honest => RatingValue::Positive,
                Honesty::Dishonest => RatingValue::Negative,
            };
            let in_camouflage = attack.is_camouflage() && r.day <= camouflage_days;
            let expected_fair = !dishonest_rater || in_camouflage;
            if (r.value == fair) != expected_fair {
                failures.push(format!("{attack}: rating fairness violated on day {}", r.day));
                break;
            }
            if dishonest_rater
                && in_camouflage
                && ledger.sellers()[r.seller.0 as usize].tier != SellerTier::Common
            {
                failures.push(format!("{attack}: camouflage phase visited a duopoly seller"));
                break;
            }
        }

        // Whitewashing accounts carry exactly one rating.
        if attack.is_whitewashing() {
            for account in ledger.accounts() {
                let owner = &ledger.entities()[account.owner.0 as usize];
                if owner.honesty == Honesty::Dishonest
                    && ledger.account_history(account.id).len() != 1
                {
                    failures.push(format!("{attack}: whitewashing account with != 1 rating"));
                    break;
                }
            }
        }

        // Hard volume bound implies the robustness bound.
        let gap = (run.result.tran_honest as i64 - run.result.tran_dishonest as i64).unsigned_abs();
        if gap > cfg.honest_buyers as u64 * cfg.days as u64 {
            failures.push(format!("{attack}: volume gap exceeds the hard bound"));
        }
    }

    // Combinator reduction identities on a mid-run snapshot.
    {
        use crate::models::{Evaluator, ModelParams};
        let mut cfg = SimulationConfig::for_attack(single(SingleModel::Personalized), AttackKind::Sybil, 3);
        cfg.days = 30;
        let run = run_simulation(&cfg).expect("runs");
        let ledger = &run.ledger;
        let buyer = crate::ledger::AccountId(0);
        let target = crate::ledger::SellerId(1);
        let mut params = ModelParams::default();
        params.combiner.epsilon = 0.0;
        for filter in [SingleModel::Brs, SingleModel::Iclub] {
            for discount in [SingleModel::Travos, SingleModel::Personalized] {
                let combo = Evaluator::new(ledger, dtf(discount, filter), &params);
                let alone = Evaluator::new(ledger, single(filter), &params);
                if (combo.reputation(buyer, target) - alone.reputation(buyer, target)).abs() > 1e-12 {
                    failures.push(format!(
                        "epsilon=0 discount-then-filter deviates from {} alone",
                        filter.name()
                    ));
                }
            }
        }

        // A pass-through filter reduces filter-then-discount to the
        // discounting model alone.
        let params = ModelParams::default();
        let ev = Evaluator::new(ledger, single(SingleModel::Travos), &params);
        let advisors: Vec<crate::ledger::AccountId> = ledger
            .raters(target)
            .iter()
            .copied()
            .filter(|&a| a != buyer)
            .collect();
        let pass_through = crate::models::HonestSet {
            advisors: {
                let mut v = advisors.clone();
                v.sort_unstable();
                v
            },
            includes_buyer: false,
        };
        let via_combiner = crate::models::combine::filter_then_discount(
            &pass_through,
            |a| ev.advisor_trust(SingleModel::Travos, buyer, a, target),
            |a| ledger.aggregate(a, target),
            ledger.aggregate(buyer, target),
        );
        let direct = ev.reputation(buyer, target);
        if (via_combiner - direct).abs() > 1e-12 {
            failures.push("pass-through filter-then-discount deviates from TRAVOS alone".into());
        }
    }

    CriterionResult {
        id: 11,
        name: "ledger, attack and combinator invariant suites",
        passed: failures.is_empty(),
        detail: failures.join("; "),
    }
}

// ---------------------------------------------------------------------------
// criterion 12: BRS hand-run fixture

fn criterion_brs_fixture() -> CriterionResult {
    use crate::ledger::{Honesty, RatingValue, RatingsLedger, SellerTier};
    use crate::models::filtering::{brs_filter, filtered_reputation};

    let mut ledger = RatingsLedger::new(20);
    let target = ledger
        .add_seller(Honesty::Dishonest, SellerTier::DuopolyDishonest)
        .expect("seller");
    let mut honest = Vec::new();
    for _ in 0..14 {
        let e = ledger.register_entity(Honesty::Honest, None).expect("entity");
        honest.push(ledger.spawn_account(e, 0).expect("account"));
    }
    let mut attackers = Vec::new();
    for _ in 0..6 {
        let e = ledger
            .register_entity(Honesty::Dishonest, Some(AttackKind::Constant))
            .expect("entity");
        attackers.push(ledger.spawn_account(e, 0).expect("account"));
    }
    for day in 1..=10u16 {
        for &a in &honest {
            ledger
                .record_transaction(a, target, day, RatingValue::Negative)
                .expect("rating");
        }
        for &a in &attackers {
            ledger
                .record_transaction(a, target, day, RatingValue::Positive)
                .expect("rating");
        }
    }

    // Hand-run oracle: round 1 rep = 61/202 ≈ 0.302 rejects the six (10,0)
    // attackers (CDF 0.302^11 < 0.01) and keeps the (0,10) honest advisors;
    // round 2 rep = 1/142 is stable.
    let set = brs_filter(&ledger, target, 0.01, None);
    let survivors_ok = set.advisors.len() == 14 && honest.iter().all(|a| set.contains(*a));
    let rep = filtered_reputation(set.advisors.iter().map(|&a| ledger.aggregate(a, target)));
    let rep_ok = (rep - 1.0 / 142.0).abs() < 1e-12 && rep < 0.1;

    // Round-1 arithmetic double-checked against the beta kernel.
    let round1_rep = 61.0 / 202.0;
    let attacker_cdf = beta_cdf(round1_rep, 11.0, 1.0).expect("in domain");
    let honest_cdf = beta_cdf(round1_rep, 1.0, 11.0).expect("in domain");
    let mechanics_ok = attacker_cdf < 0.01 && honest_cdf < 0.99;

    CriterionResult {
        id: 12,
        name: "BRS 20-advisor fixture matches the hand-run oracle",
        passed: survivors_ok && rep_ok && mechanics_ok,
        detail: format!(
            "survivors {}/20, rep {rep:.5}, round-1 CDFs attacker {attacker_cdf:.2e} honest {honest_cdf:.4}",
            set.advisors.len()
        ),
    }
}
