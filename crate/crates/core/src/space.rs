//! Indexing of points in F_q^n.
//!
//! Points are enumerated in lexicographic order: the first coordinate is
//! the most significant digit of the index, elements compare by their
//! integer encoding.

use crate::error::{Error, Result};
use crate::gf::Elem;

/// q^dim, or `None` when it overflows u64.
pub fn point_count(q: u64, dim: usize) -> Option<u64> {
    u32::try_from(dim).ok().and_then(|d| q.checked_pow(d))
}

/// q^dim checked against an enumeration cap.
pub fn checked_count(q: u64, dim: usize, cap: u64) -> Result<u64> {
    match point_count(q, dim) {
        Some(c) if c <= cap => Ok(c),
        _ => Err(Error::CapExceeded { needed: format!("{q}^{dim}"), cap }),
    }
}

pub fn decode_point(q: u64, mut idx: u64, out: &mut [Elem]) {
    for o in out.iter_mut().rev() {
        *o = Elem(idx % q);
        idx /= q;
    }
}

pub fn point(q: u64, idx: u64, dim: usize) -> Vec<Elem> {
    let mut v = vec![Elem::ZERO; dim];
    decode_point(q, idx, &mut v);
    v
}

pub fn encode_point(q: u64, pt: &[Elem]) -> u64 {
    pt.iter().fold(0u64, |acc, e| acc * q + e.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        assert_eq!(point(3, 0, 2), vec![Elem(0), Elem(0)]);
        assert_eq!(point(3, 1, 2), vec![Elem(0), Elem(1)]);
        assert_eq!(point(3, 3, 2), vec![Elem(1), Elem(0)]);
        for i in 0..27 {
            assert_eq!(encode_point(3, &point(3, i, 3)), i);
        }
        assert_eq!(point_count(256, 8), None);
        assert!(checked_count(2, 10, 1000).is_err());
        assert_eq!(checked_count(2, 10, 1024).unwrap(), 1024);
    }
}
