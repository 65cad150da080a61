//! Integer scale sets compared up to multiplicative constants.
//!
//! A [`ScaleSet`] is a truncation: values above `window_hi` are unknown,
//! never absent, so every check refuses to look past the window.

use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scale = Ratio<u64>;

/// Parses `"3"` or `"3/2"`.
pub fn parse_scale(s: &str) -> Result<Scale> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().map_err(|_| Error::parse(s, "bad numerator"))?;
            let d: u64 = d.trim().parse().map_err(|_| Error::parse(s, "bad denominator"))?;
            if d == 0 {
                return Err(Error::parse(s, "zero denominator"));
            }
            Ratio::new(n, d)
        }
        None => Ratio::from_integer(s.parse().map_err(|_| Error::parse(s, "bad constant"))?),
    };
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSet {
    elements: Vec<u64>,
    window_hi: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Bounded,
    Dense,
    Lacunary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub kind: Kind,
    pub c: String,
    pub window: (u64, u64),
    /// Maximal runs `[n_lo, n_hi]` of integers n with `[n, c·n]` missing the set.
    pub gaps: Vec<(u64, u64)>,
    /// For `Bounded`: every element is below this value.
    pub bound: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreceqOutcome {
    pub holds: bool,
    pub first_failure: Option<u64>,
}

impl ScaleSet {
    pub fn new(elements: impl IntoIterator<Item = u64>, window_hi: u64) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if let Some(&top) = elements.last() {
            if top > window_hi {
                return Err(Error::WindowTooLarge(format!("element {top} above window {window_hi}")));
            }
        }
        Ok(ScaleSet { elements, window_hi })
    }

    /// Keeps only elements `≤ window_hi`.
    pub fn truncated(elements: impl IntoIterator<Item = u64>, window_hi: u64) -> Self {
        ScaleSet::new(elements.into_iter().filter(|&e| e <= window_hi), window_hi).expect("filtered")
    }

    pub fn naturals(window_hi: u64) -> Self {
        ScaleSet { elements: (0..=window_hi).collect(), window_hi }
    }

    pub fn arithmetic(start: u64, step: u64, window_hi: u64) -> Self {
        let step = step.max(1);
        ScaleSet::truncated((0..).map(|k| start + k * step).take_while(|&v| v <= window_hi), window_hi)
    }

    /// `{1!, 2!, 3!, ...}`.
    pub fn factorials(window_hi: u64) -> Self {
        let mut out = Vec::new();
        let mut f: u64 = 1;
        for k in 1u64.. {
            f = match f.checked_mul(k) {
                Some(v) if v <= window_hi => v,
                _ => break,
            };
            out.push(f);
        }
        ScaleSet::truncated(out, window_hi)
    }

    /// `{base^1, base^2, ...}`.
    pub fn powers(base: u64, window_hi: u64) -> Self {
        let mut out = Vec::new();
        let mut p = base;
        while base >= 2 && p <= window_hi {
            out.push(p);
            match p.checked_mul(base) {
                Some(v) => p = v,
                None => break,
            }
        }
        ScaleSet::truncated(out, window_hi)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn window_hi(&self) -> u64 {
        self.window_hi
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// Union; the window is the smaller of the two, since beyond it one side is unknown.
    pub fn union(&self, other: &ScaleSet) -> ScaleSet {
        let hi = self.window_hi.min(other.window_hi);
        ScaleSet::truncated(self.elements.iter().chain(&other.elements).copied(), hi)
    }

    /// Whether some element lies in `[lo_num/lo_den, hi_num/hi_den]`.
    fn meets(&self, lo_num: u128, lo_den: u128, hi_num: u128, hi_den: u128) -> bool {
        let start = lo_num.div_ceil(lo_den);
        let idx = self.elements.partition_point(|&e| (e as u128) < start);
        match self.elements.get(idx) {
            Some(&e) => (e as u128) * hi_den <= hi_num,
            None => false,
        }
    }

    pub fn to_file_string(&self) -> String {
        let mut s = format!("window {}\n", self.window_hi);
        for e in &self.elements {
            s.push_str(&format!("{e}\n"));
        }
        s
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        text.parse().map_err(|e| match e {
            Error::Parse { location, message } => {
                Error::parse(format!("{}:{location}", path.display()), message)
            }
            other => other,
        })
    }
}

impl FromStr for ScaleSet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut window = None;
        let mut elements: Vec<u64> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let loc = format!("line {}", i + 1);
            if window.is_none() {
                let hi = line
                    .strip_prefix("window")
                    .ok_or_else(|| Error::parse(&loc, "expected header `window <hi>`"))?
                    .trim();
                window = Some(hi.parse::<u64>().map_err(|_| Error::parse(&loc, "bad window bound"))?);
                continue;
            }
            let v: u64 = line.parse().map_err(|_| Error::parse(&loc, format!("bad integer {line:?}")))?;
            if elements.last().is_some_and(|&p| p >= v) {
                return Err(Error::parse(&loc, "elements must be strictly increasing"));
            }
            elements.push(v);
        }
        let hi = window.ok_or_else(|| Error::parse("line 1", "missing `window <hi>` header"))?;
        ScaleSet::new(elements, hi)
    }
}

fn check_scale(c: Scale, strict: bool) -> Result<()> {
    let one = Ratio::from_integer(1);
    if c < one || (strict && c == one) {
        return Err(Error::ParamError(format!("constant {c} too small")));
    }
    Ok(())
}

fn check_window(hi: u64, c: Scale, set: &ScaleSet) -> Result<()> {
    let reach = hi as u128 * *c.numer() as u128;
    if reach > set.window_hi as u128 * *c.denom() as u128 {
        return Err(Error::WindowTooLarge(format!(
            "{hi}·{c} exceeds known window {}",
            set.window_hi
        )));
    }
    Ok(())
}

/// `a ≼ b` with constant `c` on `a ∩ [lo, hi]`.
pub fn preceq(a: &ScaleSet, b: &ScaleSet, c: Scale, window: (u64, u64)) -> Result<PreceqOutcome> {
    check_scale(c, false)?;
    let (lo, hi) = window;
    if hi > a.window_hi {
        return Err(Error::WindowTooLarge(format!("{hi} exceeds window {}", a.window_hi)));
    }
    check_window(hi, c, b)?;
    let (num, den) = (*c.numer() as u128, *c.denom() as u128);
    let start = a.elements.partition_point(|&e| e < lo);
    for &x in a.elements[start..].iter().take_while(|&&x| x <= hi) {
        let x = x as u128;
        if !b.meets(x * den, num, x * num, den) {
            return Ok(PreceqOutcome { holds: false, first_failure: Some(x as u64) });
        }
    }
    Ok(PreceqOutcome { holds: true, first_failure: None })
}

pub fn equivalent(a: &ScaleSet, b: &ScaleSet, c: Scale, window: (u64, u64)) -> Result<bool> {
    Ok(preceq(a, b, c, window)?.holds && preceq(b, a, c, window)?.holds)
}

pub fn classify(a: &ScaleSet, c: Scale, window: (u64, u64)) -> Result<ClassificationVerdict> {
    check_scale(c, true)?;
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::ParamError(format!("empty window [{lo}, {hi}]")));
    }
    check_window(hi, c, a)?;
    let (num, den) = (*c.numer() as u128, *c.denom() as u128);
    let mut gaps: Vec<(u64, u64)> = Vec::new();
    let mut open: Option<u64> = None;
    for n in lo..=hi {
        let hit = a.meets(n as u128, 1, n as u128 * num, den);
        match (hit, open) {
            (false, None) => open = Some(n),
            (true, Some(s)) => {
                gaps.push((s, n - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        gaps.push((s, hi));
    }
    let (kind, bound) = match gaps.last() {
        None => (Kind::Dense, None),
        Some(&(s, e)) if e == hi && a.elements.last().map_or(true, |&m| m < s) => {
            (Kind::Bounded, Some(s))
        }
        Some(_) => (Kind::Lacunary, None),
    };
    Ok(ClassificationVerdict { kind, c: c.to_string(), window, gaps, bound })
}

/// Smallest integer `c` in `2..=c_max` for which `a` is dense on the window.
pub fn minimal_dense_constant(a: &ScaleSet, window: (u64, u64), c_max: u64) -> Result<Option<u64>> {
    for c in 2..=c_max {
        let scale = Ratio::from_integer(c);
        if check_window(window.1, scale, a).is_err() {
            break;
        }
        if classify(a, scale, window)?.kind == Kind::Dense {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(c: u64) -> Scale {
        Ratio::from_integer(c)
    }

    #[test]
    fn preceq_examples() {
        let a = ScaleSet::new([8, 16], 100).unwrap();
        let b = ScaleSet::naturals(100);
        assert!(preceq(&a, &b, int(1), (1, 20)).unwrap().holds);

        let a = ScaleSet::new([2, 24, 720], 10_000).unwrap();
        let b = ScaleSet::new([6, 120, 5040], 10_000).unwrap();
        let r = preceq(&a, &b, int(2), (1, 1000)).unwrap();
        assert_eq!(r, PreceqOutcome { holds: false, first_failure: Some(2) });
        let r = preceq(&a, &b, int(3), (1, 1000)).unwrap();
        assert_eq!(r.first_failure, Some(24));
    }

    #[test]
    fn preceq_refuses_unknown_territory() {
        let a = ScaleSet::new([5], 10).unwrap();
        let b = ScaleSet::new([9], 15).unwrap();
        assert!(matches!(preceq(&a, &b, int(2), (1, 10)), Err(Error::WindowTooLarge(_))));
    }

    #[test]
    fn equivalence_examples() {
        let a = ScaleSet::new([5], 20).unwrap();
        let b = ScaleSet::new([9], 20).unwrap();
        assert!(equivalent(&a, &b, int(2), (1, 10)).unwrap());
        let f = ScaleSet::factorials(1400);
        let n = ScaleSet::naturals(1400);
        assert!(!equivalent(&f, &n, int(2), (1, 700)).unwrap());
        let r = preceq(&n, &f, int(2), (1, 700)).unwrap();
        assert!(!r.holds);
        assert!(equivalent(&f, &f, int(1), (1, 700)).unwrap());
    }

    #[test]
    fn rational_constant() {
        let a = ScaleSet::new([10], 40).unwrap();
        let b = ScaleSet::new([15], 40).unwrap();
        assert!(preceq(&a, &b, Ratio::new(3, 2), (1, 20)).unwrap().holds);
        assert!(!preceq(&a, &b, Ratio::new(7, 5), (1, 20)).unwrap().holds);
    }

    #[test]
    fn classify_examples() {
        let a = ScaleSet::arithmetic(8, 4, 1000);
        assert_eq!(classify(&a, int(8), (1, 100)).unwrap().kind, Kind::Dense);

        let f = ScaleSet::factorials(1000);
        let v = classify(&f, int(3), (2, 300)).unwrap();
        assert_eq!(v.kind, Kind::Lacunary);
        assert!(v.gaps.iter().any(|&(s, e)| s <= 25 && 25 <= e));

        let b = ScaleSet::new([2, 4], 1000).unwrap();
        let v = classify(&b, int(2), (10, 100)).unwrap();
        assert_eq!(v.kind, Kind::Bounded);
        assert_eq!(v.gaps, vec![(10, 100)]);
    }

    #[test]
    fn minimal_constant() {
        let a = ScaleSet::arithmetic(8, 4, 1000);
        assert_eq!(minimal_dense_constant(&a, (1, 100), 10).unwrap(), Some(8));
        assert_eq!(minimal_dense_constant(&ScaleSet::naturals(1000), (1, 100), 10).unwrap(), Some(2));
    }

    #[test]
    fn file_round_trip() {
        let s = ScaleSet::powers(3, 500);
        let back: ScaleSet = s.to_file_string().parse().unwrap();
        assert_eq!(back, s);
        let parsed: ScaleSet = "# comment\nwindow 50\n3 # three\n7\n".parse().unwrap();
        assert_eq!(parsed.elements(), &[3, 7]);
        assert!(matches!("3\n".parse::<ScaleSet>(), Err(Error::Parse { .. })));
        assert!(matches!("window 9\n5\n4\n".parse::<ScaleSet>(), Err(Error::Parse { .. })));
    }
}
