//! Strategies, payoffs and best responses for the two game models.
//!
//! Strategy `01` joins activity A only (payoff `a`, benefit `alpha_a`),
//! `10` joins B only, `11` joins both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    S00,
    S01,
    S10,
    S11,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::S00, Strategy::S01, Strategy::S10, Strategy::S11];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Strategy {
        Self::ALL[i]
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::S00 => "00",
            Strategy::S01 => "01",
            Strategy::S10 => "10",
            Strategy::S11 => "11",
        }
    }

    /// Relabel A <-> B.
    pub fn swap_ab(self) -> Strategy {
        match self {
            Strategy::S01 => Strategy::S10,
            Strategy::S10 => Strategy::S01,
            s => s,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "00" => Ok(Strategy::S00),
            "01" => Ok(Strategy::S01),
            "10" => Ok(Strategy::S10),
            "11" => Ok(Strategy::S11),
            other => Err(Error::Parameter(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Per-strategy neighbor counts of a player.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct NeighborProfile {
    pub m00: usize,
    pub m01: usize,
    pub m10: usize,
    pub m11: usize,
}

impl NeighborProfile {
    pub const fn new(m00: usize, m01: usize, m10: usize, m11: usize) -> Self {
        NeighborProfile { m00, m01, m10, m11 }
    }

    pub fn from_counts(c: [usize; 4]) -> Self {
        NeighborProfile::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.m00 + self.m01 + self.m10 + self.m11
    }

    #[inline]
    pub fn counts(&self) -> [usize; 4] {
        [self.m00, self.m01, self.m10, self.m11]
    }

    #[inline]
    pub fn get(&self, s: Strategy) -> usize {
        self.counts()[s.index()]
    }

    pub fn swap_ab(&self) -> Self {
        NeighborProfile::new(self.m00, self.m10, self.m01, self.m11)
    }
}

/// Payoffs of the bilingual coordination game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinationParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

impl CoordinationParams {
    pub fn new(a: f64, b: f64, c: f64, delta: f64) -> Result<Self> {
        let p = CoordinationParams { a, b, c, delta };
        p.validate()?;
        Ok(p)
    }

    /// Checks `a > c > 0`, `b > c`, `delta > c - a` and `delta > c - b`.
    pub fn validate(&self) -> Result<()> {
        let CoordinationParams { a, b, c, delta } = *self;
        let fail = |what: String| Err(Error::Assumption(what));
        if [a, b, c, delta].iter().any(|v| !v.is_finite()) {
            return fail("payoff parameters must be finite".into());
        }
        let checks = [
            (c > 0.0, format!("c > 0 (got c = {c})")),
            (a > c, format!("a > c (got a = {a}, c = {c})")),
            (b > c, format!("b > c (got b = {b}, c = {c})")),
            (delta > c - a, format!("delta > c - a (got delta = {delta}, c - a = {})", c - a)),
            (delta > c - b, format!("delta > c - b (got delta = {delta}, c - b = {})", c - b)),
        ];
        let violated: Vec<String> = checks.into_iter().filter(|(ok, _)| !ok).map(|(_, what)| what).collect();
        if violated.is_empty() {
            Ok(())
        } else {
            fail(violated.join("; "))
        }
    }

    pub fn swap_ab(&self) -> Self {
        CoordinationParams { a: self.b, b: self.a, ..*self }
    }
}

/// Quadratic-utility network game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityParams {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl UtilityParams {
    pub fn new(alpha_a: f64, alpha_b: f64, gamma: f64, beta: f64) -> Result<Self> {
        let p = UtilityParams { alpha_a, alpha_b, gamma, beta };
        p.validate()?;
        Ok(p)
    }

    /// Checks `alpha_a <= 1/2`, `alpha_b <= 1/2`, `alpha_a + alpha_b - 1 + beta/2 <= 0`
    /// and `gamma >= 0`.
    pub fn validate(&self) -> Result<()> {
        let UtilityParams { alpha_a, alpha_b, gamma, beta } = *self;
        let fail = |what: String| Err(Error::Assumption(what));
        if [alpha_a, alpha_b, gamma, beta].iter().any(|v| !v.is_finite()) {
            return fail("utility parameters must be finite".into());
        }
        if alpha_a > 0.5 {
            return fail(format!("alphaA <= 1/2 (got {alpha_a})"));
        }
        if alpha_b > 0.5 {
            return fail(format!("alphaB <= 1/2 (got {alpha_b})"));
        }
        let s = alpha_a + alpha_b - 1.0 + beta / 2.0;
        if s > 0.0 {
            return fail(format!("alphaA + alphaB - 1 + beta/2 <= 0 (got {s})"));
        }
        if gamma < 0.0 {
            return fail(format!("gamma >= 0 (got {gamma})"));
        }
        Ok(())
    }

    pub fn swap_ab(&self) -> Self {
        UtilityParams { alpha_a: self.alpha_b, alpha_b: self.alpha_a, ..*self }
    }
}

/// Either response model; everything downstream is generic over this.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Coordination(CoordinationParams),
    Utility(UtilityParams),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Coordination(_) => "coordination",
            Model::Utility(_) => "utility",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Coordination(p) => p.validate(),
            Model::Utility(p) => p.validate(),
        }
    }

    pub fn value(&self, s: Strategy, m: &NeighborProfile) -> f64 {
        match self {
            Model::Coordination(p) => coordination_payoff(s, m, p),
            Model::Utility(p) => utility_value(s, m, p),
        }
    }

    pub fn best_response(&self, m: &NeighborProfile) -> BestResponse {
        match self {
            Model::Coordination(p) => coordination_best_response(m, p),
            Model::Utility(p) => utility_best_response(m, p),
        }
    }

    pub fn swap_ab(&self) -> Model {
        match self {
            Model::Coordination(p) => Model::Coordination(p.swap_ab()),
            Model::Utility(p) => Model::Utility(p.swap_ab()),
        }
    }

    /// `(key, value)` pairs using the config-file key names.
    pub fn param_pairs(&self) -> Vec<(&'static str, f64)> {
        match self {
            Model::Coordination(p) => vec![("a", p.a), ("b", p.b), ("c", p.c), ("delta", p.delta)],
            Model::Utility(p) => {
                vec![("alphaA", p.alpha_a), ("alphaB", p.alpha_b), ("beta", p.beta), ("gamma", p.gamma)]
            }
        }
    }
}

/// Set of maximizing strategies plus the value of every strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BestResponse {
    mask: u8,
    pub values: [f64; 4],
}

impl BestResponse {
    fn from_mask(mask: u8, values: [f64; 4]) -> Self {
        debug_assert!(mask != 0 && mask < 16);
        BestResponse { mask, values }
    }

    #[inline]
    pub fn contains(&self, s: Strategy) -> bool {
        self.mask & (1 << s.index()) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Members in strategy order.
    pub fn iter(&self) -> impl Iterator<Item = Strategy> + '_ {
        Strategy::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    /// The `i`-th member in strategy order; used for uniform tie-breaking.
    pub fn nth(&self, i: usize) -> Strategy {
        self.iter().nth(i).expect("tie index out of range")
    }

    pub fn unique(&self) -> Option<Strategy> {
        (self.len() == 1).then(|| self.nth(0))
    }
}

// Exact comparison: ties are whatever the f64 evaluation makes equal.
fn argmax_mask(values: &[f64; 4], candidates: u8) -> u8 {
    let best = Strategy::ALL
        .iter()
        .filter(|s| candidates & (1 << s.index()) != 0)
        .map(|s| values[s.index()])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut mask = 0u8;
    for s in Strategy::ALL {
        if candidates & (1 << s.index()) != 0 && values[s.index()] == best {
            mask |= 1 << s.index();
        }
    }
    mask
}

pub fn coordination_payoff(s: Strategy, m: &NeighborProfile, p: &CoordinationParams) -> f64 {
    let k = m.degree() as f64;
    let (m01, m10, m11) = (m.m01 as f64, m.m10 as f64, m.m11 as f64);
    match s {
        Strategy::S00 => 0.0,
        Strategy::S01 => -p.c * k + p.a * (m01 + m11),
        Strategy::S10 => -p.c * k + p.b * (m10 + m11),
        // grouped so that swapping A and B mirrors the result bit for bit
        Strategy::S11 => -2.0 * p.c * k + (p.a * m01 + p.b * m10) + (p.a + p.b + p.delta) * m11,
    }
}

pub fn coordination_best_response(m: &NeighborProfile, p: &CoordinationParams) -> BestResponse {
    let values = Strategy::ALL.map(|s| coordination_payoff(s, m, p));
    BestResponse::from_mask(argmax_mask(&values, 0b1111), values)
}

pub fn utility_value(s: Strategy, m: &NeighborProfile, p: &UtilityParams) -> f64 {
    let (m01, m10, m11) = (m.m01 as f64, m.m10 as f64, m.m11 as f64);
    match s {
        Strategy::S00 => 0.0,
        Strategy::S01 => p.alpha_a - 0.5 + p.gamma * (m01 + m11),
        Strategy::S10 => p.alpha_b - 0.5 + p.gamma * (m10 + m11),
        Strategy::S11 => p.alpha_a + p.alpha_b - 1.0 + p.beta / 2.0 + p.gamma * (m10 + m01 + 2.0 * m11),
    }
}

/// Utility maximizers; `{00}` whenever no active strategy has positive utility.
pub fn utility_best_response(m: &NeighborProfile, p: &UtilityParams) -> BestResponse {
    let values = Strategy::ALL.map(|s| utility_value(s, m, p));
    let best_active = values[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mask = if best_active <= 0.0 { 0b0001 } else { argmax_mask(&values, 0b1110) };
    BestResponse::from_mask(mask, values)
}

/// Transition probabilities from `current` given the neighbor profile.
///
/// Mass is split uniformly over the best responses whatever the current
/// strategy. Isolated players (`k = 0`) keep their strategy.
pub fn response_probability(current: Strategy, m: &NeighborProfile, model: &Model) -> [f64; 4] {
    let mut out = [0.0; 4];
    if m.degree() == 0 {
        out[current.index()] = 1.0;
        return out;
    }
    let br = model.best_response(m);
    let w = 1.0 / br.len() as f64;
    for s in br.iter() {
        out[s.index()] = w;
    }
    out
}

/// Minimum `p` for each symmetric pair `(s, s)` to be p-dominant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PDominance {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl PDominance {
    pub fn get(&self, s: Strategy) -> f64 {
        match s {
            Strategy::S00 => self.p00,
            Strategy::S01 => self.p01,
            Strategy::S10 => self.p10,
            Strategy::S11 => self.p11,
        }
    }
}

pub fn p_dominance_thresholds(p: &CoordinationParams) -> Result<PDominance> {
    p.validate()?;
    let CoordinationParams { a, b, c, delta } = *p;
    let max3 = |x: f64, y: f64, z: f64| x.max(y).max(z);
    Ok(PDominance {
        p00: max3((a - c) / a, (b - c) / b, 1.0 - 2.0 * c / (a + b + delta)),
        p01: max3(c / a, b / (a + b), 1.0 - c / b.max(b + delta)),
        p10: max3(c / b, a / (a + b), 1.0 - c / a.max(a + delta)),
        p11: max3(2.0 * c / (a + b + delta), c / (b + delta), c / (a + delta)),
    })
}

/// Pairwise risk-dominant equilibrium `(s, s)`, or `None` when the
/// parameters sit on a case boundary or match no case.
pub fn risk_dominant(p: &CoordinationParams) -> Result<Option<Strategy>> {
    p.validate()?;
    let CoordinationParams { a, b, c, delta: d } = *p;
    let cases = [
        (Strategy::S00, c - d < a && a < 2.0 * c && c - d < b && b < 2.0 * c && a + b + d < 4.0 * c),
        (Strategy::S01, 2.0 * c < a && a > b && c < b && b < 2.0 * c - d),
        (Strategy::S10, 2.0 * c < b && b > a && c < a && a < 2.0 * c - d),
        (Strategy::S11, 2.0 * c - d < a && 2.0 * c - d < b && a + b + d > 4.0 * c),
    ];
    let mut hits = cases.iter().filter(|(_, ok)| *ok).map(|(s, _)| *s);
    match (hits.next(), hits.next()) {
        (Some(s), None) => Ok(Some(s)),
        _ => Ok(None),
    }
}
