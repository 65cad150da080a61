use crate::error::{Error, Result};

use super::companion::ModuleGroupSpec;
use super::MarkedGroup;

/// Lamp base of a wreath product with top group `ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LampBase {
    Cyclic(u64),
    Integers,
}

impl LampBase {
    pub fn modulus(self) -> u64 {
        match self {
            LampBase::Cyclic(q) => q,
            LampBase::Integers => 0,
        }
    }

    pub fn tag(self) -> String {
        match self {
            LampBase::Cyclic(q) => format!("c{q}"),
            LampBase::Integers => "z".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "z" {
            return Ok(LampBase::Integers);
        }
        let q: u64 = s
            .strip_prefix('c')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::UnknownGroupSpec(format!("lamp base {s:?}")))?;
        if q < 2 {
            return Err(Error::ParamError(format!("cyclic base needs q ≥ 2, got {q}")));
        }
        Ok(LampBase::Cyclic(q))
    }
}

pub fn wreath_module(base: LampBase) -> ModuleGroupSpec {
    ModuleGroupSpec::lamp(format!("wreath({},z)", base.tag()), base.modulus())
}

pub fn wreath_group(base: LampBase) -> MarkedGroup {
    wreath_module(base).group()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Word;
    use crate::oracles::Verdict3;

    fn wn(n: i64) -> Word {
        let t = Word::gen_power(0, 1);
        let x = Word::gen_power(1, 1);
        x.conjugate_by(&t.pow(n)).commutator(&x)
    }

    #[test]
    fn wreath_examples() {
        let zz = wreath_group(LampBase::Integers);
        for n in 1..=5 {
            assert_eq!(zz.is_identity(&wn(n)), Verdict3::True);
            assert_eq!(wn(n).len() as i64, 4 * n + 4);
        }
        assert_eq!(zz.is_identity(&zz.parse("xx").unwrap()), Verdict3::False);
        let c2 = wreath_group(LampBase::Cyclic(2));
        assert_eq!(c2.is_identity(&c2.parse("xx").unwrap()), Verdict3::True);
        assert_eq!(c2.is_identity(&c2.parse("tx").unwrap()), Verdict3::False);
    }
}
