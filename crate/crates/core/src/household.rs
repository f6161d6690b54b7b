//! Two-member household choosing between 10 utiles at `t` and 15 utiles at
//! `t + 1`, with member discount factors 0.8 and 0.5.
//!
//! Each member is exponential and therefore time consistent, yet the summed
//! household preference prefers the earlier reward at `t = 0` and the later
//! one from `t = 1` on. Everything is computed with exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::csv::Table;

pub const EARLIER_UTILES: i64 = 10;
pub const LATER_UTILES: i64 = 15;
/// Member discount factors as `(numerator, denominator)`.
pub const FACTORS: [(i64, i64); 2] = [(4, 5), (1, 2)];
pub const DEFAULT_HORIZON: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Earlier,
    Later,
    Indifferent,
}

impl Choice {
    fn of(earlier: &BigRational, later: &BigRational) -> Self {
        match earlier.cmp(later) {
            std::cmp::Ordering::Greater => Choice::Earlier,
            std::cmp::Ordering::Less => Choice::Later,
            std::cmp::Ordering::Equal => Choice::Indifferent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdRow {
    pub t: u32,
    /// `10·Σ δᵢ^t`.
    pub earlier: BigRational,
    /// `15·Σ δᵢ^(t+1)`.
    pub later: BigRational,
    pub choice: Choice,
    /// Each member's own choice, in the order of [`FACTORS`].
    pub member_choices: Vec<Choice>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdReport {
    pub rows: Vec<HouseholdRow>,
    /// Periods at which the household choice differs from the previous period.
    pub flips: Vec<u32>,
}

fn factor(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn household_report(horizon: u32) -> HouseholdReport {
    let earlier_u = BigRational::from_integer(EARLIER_UTILES.into());
    let later_u = BigRational::from_integer(LATER_UTILES.into());
    let deltas: Vec<BigRational> = FACTORS.iter().map(|&(n, d)| factor(n, d)).collect();

    let mut rows: Vec<HouseholdRow> = Vec::with_capacity(horizon as usize + 1);
    for t in 0..=horizon {
        let mut earlier = BigRational::zero();
        let mut later = BigRational::zero();
        let mut member_choices = Vec::with_capacity(deltas.len());
        for d in &deltas {
            let now: BigRational = Pow::pow(d, t);
            let e = &earlier_u * &now;
            let l = &later_u * &now * d;
            member_choices.push(Choice::of(&e, &l));
            earlier += e;
            later += l;
        }
        let choice = Choice::of(&earlier, &later);
        rows.push(HouseholdRow {
            t,
            earlier,
            later,
            choice,
            member_choices,
        });
    }
    let flips = rows
        .windows(2)
        .filter(|w| w[0].choice != w[1].choice)
        .map(|w| w[1].t)
        .collect();
    HouseholdReport { rows, flips }
}

fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HouseholdRowRecord {
    pub t: u32,
    pub earlier: String,
    pub later: String,
    pub earlier_approx: f64,
    pub later_approx: f64,
    pub choice: Choice,
    pub member_choices: Vec<Choice>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HouseholdRecord {
    pub earlier_utiles: i64,
    pub later_utiles: i64,
    pub factors: Vec<f64>,
    pub flips: Vec<u32>,
    pub rows: Vec<HouseholdRowRecord>,
}

impl HouseholdReport {
    pub fn choice_at(&self, t: u32) -> Option<Choice> {
        self.rows.get(t as usize).map(|r| r.choice)
    }

    pub fn record(&self) -> HouseholdRecord {
        HouseholdRecord {
            earlier_utiles: EARLIER_UTILES,
            later_utiles: LATER_UTILES,
            factors: FACTORS.iter().map(|&(n, d)| n as f64 / d as f64).collect(),
            flips: self.flips.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| HouseholdRowRecord {
                    t: r.t,
                    earlier: rational_string(&r.earlier),
                    later: rational_string(&r.later),
                    earlier_approx: r.earlier.to_f64().unwrap_or(f64::NAN),
                    later_approx: r.later.to_f64().unwrap_or(f64::NAN),
                    choice: r.choice,
                    member_choices: r.member_choices.clone(),
                })
                .collect(),
        }
    }

    /// Columns `t, earlier, later, later_minus_earlier, choice` where choice is
    /// `-1` earlier, `1` later, `0` indifferent.
    pub fn to_table(&self) -> Table {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let e = r.earlier.to_f64().unwrap_or(f64::NAN);
                let l = r.later.to_f64().unwrap_or(f64::NAN);
                let gap = (&r.later - &r.earlier).to_f64().unwrap_or(f64::NAN);
                let c = match r.choice {
                    Choice::Earlier => -1.0,
                    Choice::Later => 1.0,
                    Choice::Indifferent => 0.0,
                };
                vec![r.t as f64, e, l, gap, c]
            })
            .collect();
        Table::new(
            ["t", "earlier", "later", "later_minus_earlier", "choice"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            rows,
        )
        .with_meta("scenario", "household")
        .with_meta("earlier_utiles", EARLIER_UTILES.to_string())
        .with_meta("later_utiles", LATER_UTILES.to_string())
        .with_meta("discount_factors", "0.8 0.5")
        .with_meta("choice_coding", "-1 earlier, 1 later, 0 indifferent")
    }
}
