//! Symbolic phase-portrait codes.
//!
//! Lower-case letters are equilibria and upper-case letters limit cycles,
//! `s`/`S` stable and `u`/`U` unstable. Subscript 1 marks the left
//! equilibrium and the cycles around it alone, subscript 2 the right one.
//! Unsubscripted cycles surround every equilibrium. Within a group cycles are
//! listed from inside out; the saddle carries no symbol.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{cycle_census, CycleSearchConfig, LimitCycle, Stability};
use crate::error::{Error, Result};
use crate::model::{equilibria, EquilibriumKind, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Glyph {
    /// stable equilibrium
    S,
    /// unstable equilibrium
    U,
    /// stable cycle
    CycleS,
    /// unstable cycle
    CycleU,
}

impl Glyph {
    pub fn as_char(self) -> char {
        match self {
            Glyph::S => 's',
            Glyph::U => 'u',
            Glyph::CycleS => 'S',
            Glyph::CycleU => 'U',
        }
    }

    pub fn is_equilibrium(self) -> bool {
        matches!(self, Glyph::S | Glyph::U)
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            's' => Some(Glyph::S),
            'u' => Some(Glyph::U),
            'S' => Some(Glyph::CycleS),
            'U' => Some(Glyph::CycleU),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub glyph: Glyph,
    /// 1 (left), 2 (right) or none.
    pub sub: Option<u8>,
}

impl Token {
    fn group(&self) -> u8 {
        self.sub.unwrap_or(3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortraitCode {
    tokens: Vec<Token>,
}

impl PortraitCode {
    /// Builds a code and puts it in canonical order: group 1, group 2, then
    /// unsubscripted tokens, each group keeping its given order.
    pub fn new(mut tokens: Vec<Token>) -> Self {
        tokens.sort_by_key(Token::group);
        Self { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Exchanges subscripts 1 and 2: the code of the mirrored portrait.
    pub fn swap_subscripts(&self) -> Self {
        let tokens = self
            .tokens
            .iter()
            .map(|t| Token {
                glyph: t.glyph,
                sub: t.sub.map(|s| 3 - s),
            })
            .collect();
        Self::new(tokens)
    }

    pub fn cycle_count(&self) -> usize {
        self.tokens.iter().filter(|t| !t.glyph.is_equilibrium()).count()
    }
}

impl fmt::Display for PortraitCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            write!(f, "{}", t.glyph.as_char())?;
            if let Some(s) = t.sub {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PortraitCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidParameter { name: "code", reason };
        let mut tokens: Vec<Token> = Vec::new();
        for c in s.chars() {
            if let Some(glyph) = Glyph::from_char(c) {
                tokens.push(Token { glyph, sub: None });
            } else if c == '1' || c == '2' {
                match tokens.last_mut() {
                    Some(t) if t.sub.is_none() => t.sub = Some(c as u8 - b'0'),
                    _ => return Err(bad(format!("misplaced subscript in {s:?}"))),
                }
            } else {
                return Err(bad(format!("unexpected character {c:?} in {s:?}")));
            }
        }
        if tokens.is_empty() {
            return Err(bad("empty code".into()));
        }
        Ok(Self::new(tokens))
    }
}

impl Serialize for PortraitCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PortraitCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every rough portrait known for the system, in canonical form.
pub const CATALOGUE: [&str; 22] = [
    "s1s2",
    "s1s2US",
    "s1U1s2US",
    "s1s2U2US",
    "s1U1s2",
    "s1s2U2",
    "u1s2",
    "s1u2",
    "u1s2US",
    "s1u2US",
    "s1U1s2S",
    "s1s2U2S",
    "s1U1s2U2S",
    "u1s2U2S",
    "s1U1u2S",
    "u1s2S",
    "s1u2S",
    "u1u2S",
    "s",
    "sUS",
    "uS",
    "uSUS",
];

pub fn is_catalogued(code: &PortraitCode) -> bool {
    let s = code.to_string();
    CATALOGUE.contains(&s.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitConfig {
    pub search: CycleSearchConfig,
    /// Root tolerance for equilibria.
    pub eq_tol: f64,
    /// Equilibria with `|det|`, or non-saddles with `|trace|`, below this
    /// are refused.
    pub trace_tol: f64,
    /// Cycles with `|dP/dr - 1|` below this are refused.
    pub slope_tol: f64,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        Self {
            search: CycleSearchConfig::default(),
            eq_tol: 1e-13,
            trace_tol: 1e-6,
            slope_tol: 1e-5,
        }
    }
}

fn cycle_tokens(cycles: &[LimitCycle], sub: Option<u8>, slope_tol: f64) -> Result<Vec<Token>> {
    cycles
        .iter()
        .map(|c| {
            let glyph = match c.stability {
                Stability::Stable => Glyph::CycleS,
                Stability::Unstable => Glyph::CycleU,
                Stability::SemiStable => {
                    return Err(Error::DegenerateParameters(format!(
                        "semistable cycle at section radius {}",
                        c.section_radius
                    )))
                }
            };
            if (c.floquet_slope - 1.0).abs() < slope_tol {
                return Err(Error::DegenerateParameters(format!(
                    "cycle at section radius {} has multiplier {}",
                    c.section_radius, c.floquet_slope
                )));
            }
            Ok(Token { glyph, sub })
        })
        .collect()
}

/// Code of the portrait at `p`. Points near a bifurcation (double or
/// neutral equilibria, weak foci, near-double cycles) are refused with
/// [`Error::DegenerateParameters`].
pub fn classify_portrait(p: &Params, cfg: &PortraitConfig) -> Result<PortraitCode> {
    let eqs = equilibria(p, cfg.eq_tol);
    for eq in &eqs {
        if eq.kind == EquilibriumKind::Degenerate || eq.det.abs() < cfg.trace_tol {
            return Err(Error::DegenerateParameters(format!(
                "equilibrium at u0 = {} is degenerate (trace {}, det {})",
                eq.u0, eq.trace, eq.det
            )));
        }
        if eq.kind != EquilibriumKind::Saddle && eq.trace.abs() < cfg.trace_tol {
            return Err(Error::DegenerateParameters(format!(
                "equilibrium at u0 = {} has trace {}",
                eq.u0, eq.trace
            )));
        }
    }
    let census = cycle_census(p, &eqs, &cfg.search)?;
    let eq_token = |kind: EquilibriumKind, sub| Token {
        glyph: if kind.is_stable() { Glyph::S } else { Glyph::U },
        sub,
    };
    let mut tokens = Vec::new();
    match eqs.as_slice() {
        [eq] => {
            tokens.push(eq_token(eq.kind, None));
            tokens.extend(cycle_tokens(&census.around[0], None, cfg.slope_tol)?);
        }
        [left, _, right] => {
            tokens.push(eq_token(left.kind, Some(1)));
            tokens.extend(cycle_tokens(&census.around[0], Some(1), cfg.slope_tol)?);
            tokens.push(eq_token(right.kind, Some(2)));
            tokens.extend(cycle_tokens(&census.around[2], Some(2), cfg.slope_tol)?);
            tokens.extend(cycle_tokens(&census.enclosing, None, cfg.slope_tol)?);
        }
        _ => unreachable!("cycle_census accepts one or three equilibria"),
    }
    Ok(PortraitCode::new(tokens))
}
