//! Central lengths `X_ℓ(Z_I)` for `Z_I = span{tⁱ : i ∈ I} ⊂ 𝔽_p[t]`.

use crate::error::{Error, Result};
use crate::intmat::{is_prime, FpEchelon};
use crate::scalesets::ScaleSet;

/// Coefficients of `Σ a_k t^k` stored highest degree first, so an echelon
/// pivot is a leading term.
fn coords(poly: &[(usize, u64)], max_len: usize) -> Vec<u64> {
    let mut v = vec![0; max_len + 1];
    for &(k, a) in poly {
        v[max_len - k] = a;
    }
    v
}

fn degree(v: &[u64], max_len: usize) -> Option<usize> {
    v.iter().position(|&x| x != 0).map(|i| max_len - i)
}

/// `n` with an element of length `n` outside the span of shorter elements.
pub fn abels_xell(i: &[usize], p: u64, max_len: usize) -> Result<ScaleSet> {
    if !is_prime(p) {
        return Err(Error::ParamError(format!("{p} is not prime")));
    }
    if let Some(&bad) = i.iter().find(|&&k| k > max_len) {
        return Err(Error::ParamError(format!("{bad} outside [0, {max_len}]")));
    }
    // Spanning set: the z_i and the sums of consecutive pairs, so the echelon has work to do.
    let mut gens: Vec<Vec<u64>> = i.iter().map(|&k| coords(&[(k, 1)], max_len)).collect();
    for w in i.windows(2) {
        gens.push(coords(&[(w[0], p - 1), (w[1], 1)], max_len));
    }
    let mut basis = FpEchelon::new(p, max_len + 1);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for g in &gens {
        if basis.insert(g) {
            rows.push(g.clone());
        }
    }
    let mut out = Vec::new();
    for n in 0..=max_len {
        let mut shorter = FpEchelon::new(p, max_len + 1);
        let mut at_n = Vec::new();
        // Elements of length ≤ n: combinations of spanning vectors whose degree is ≤ n
        // after reduction; taken from an echelon built in leading-term order.
        for r in echelon_rows(&rows, p, max_len) {
            match degree(&r, max_len) {
                Some(d) if d < n => {
                    shorter.insert(&r);
                }
                Some(d) if d == n => at_n.push(r),
                _ => {}
            }
        }
        if at_n.iter().any(|r| !shorter.contains(r)) {
            out.push(n as u64);
        }
    }
    ScaleSet::new(out, max_len as u64)
}

/// Fully reduced echelon rows of the span; each row's degree is its pivot.
fn echelon_rows(rows: &[Vec<u64>], p: u64, max_len: usize) -> Vec<Vec<u64>> {
    let mut red: Vec<Vec<u64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for q in &red {
            let piv = q.iter().position(|&x| x != 0).expect("nonzero");
            let f = v[piv];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(q) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else { continue };
        let inv = modpow(v[piv], p - 2, p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        for q in red.iter_mut() {
            let f = q[piv];
            if f != 0 {
                for (x, y) in q.iter_mut().zip(&v) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        red.push(v);
    }
    debug_assert!(red.iter().all(|r| degree(r, max_len).is_some()));
    red
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(abels_xell(&[1, 3], 2, 6).unwrap().elements(), &[1, 3]);
        assert!(abels_xell(&[], 2, 6).unwrap().elements().is_empty());
        assert_eq!(abels_xell(&[2], 3, 5).unwrap().elements(), &[2]);
        assert!(abels_xell(&[7], 2, 5).is_err());
        assert!(abels_xell(&[1], 4, 5).is_err());
    }
}
