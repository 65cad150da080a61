use crate::cayley::fill::FillingDiagram;
use crate::error::{Error, Result};
use crate::oracles::{MarkedGroup, Verdict3};

/// Every piece is a short relation of `g` and the product of conjugates is the target.
pub fn verify_filling(g: &MarkedGroup, d: &FillingDiagram) -> Result<bool> {
    for (_, r) in &d.pieces {
        if r.len() > d.max_piece_len {
            return Ok(false);
        }
        match g.is_identity(r) {
            Verdict3::True => {}
            Verdict3::False => return Ok(false),
            Verdict3::Unknown { .. } => return Err(Error::OracleUnknown(format!("is {} trivial", g.format(r)))),
        }
    }
    Ok(d.product() == d.target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Word;
    use crate::oracles::basic::free_abelian;

    #[test]
    fn square_commutator_diagram() {
        let g = free_abelian(2).unwrap();
        let c = g.parse("xyXY").unwrap();
        let target = g.parse("xyyXYY").unwrap();
        // [x,y²] = [x,y] · y[x,y]y⁻¹
        let d = FillingDiagram {
            target: target.clone(),
            pieces: vec![(Word::empty(), c.clone()), (g.parse("y").unwrap(), c.clone())],
            max_piece_len: 4,
        };
        assert_eq!(d.product(), target);
        assert!(verify_filling(&g, &d).unwrap());
        let mut bad = d.clone();
        bad.pieces[1].1 = g.parse("xyXX").unwrap();
        assert!(!verify_filling(&g, &bad).unwrap());
        let empty = FillingDiagram { target: Word::empty(), pieces: vec![], max_piece_len: 1 };
        assert!(verify_filling(&g, &empty).unwrap());
    }
}
