//! Exact finite distributions over `F_q^n` and the quantities defined on them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::space;

/// A distribution given by integer weights on point indices (lexicographic
/// order), so every probability is the exact rational `count / total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionTable {
    q: u64,
    dim: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl DistributionTable {
    pub fn empty(q: u64, dim: usize) -> Result<DistributionTable> {
        if space::point_count(q, dim).is_none() {
            return Err(Error::CapExceeded { needed: format!("{q}^{dim}"), cap: u64::MAX });
        }
        Ok(DistributionTable { q, dim, counts: BTreeMap::new(), total: 0 })
    }

    /// `U_{n,q}`, materialized; `q^n` must be at most `cap`.
    pub fn uniform(q: u64, dim: usize, cap: u64) -> Result<DistributionTable> {
        let size = space::checked_count(q, dim, cap)?;
        let mut t = DistributionTable::empty(q, dim)?;
        for i in 0..size {
            t.add_index(i, 1);
        }
        Ok(t)
    }

    pub fn point_mass(q: u64, pt: &[Elem]) -> Result<DistributionTable> {
        let mut t = DistributionTable::empty(q, pt.len())?;
        t.add(pt, 1)?;
        Ok(t)
    }

    /// Flat distribution on the given points (repeats add weight).
    pub fn flat(q: u64, dim: usize, pts: &[Vec<Elem>]) -> Result<DistributionTable> {
        let mut t = DistributionTable::empty(q, dim)?;
        for p in pts {
            t.add(p, 1)?;
        }
        Ok(t)
    }

    pub fn add(&mut self, pt: &[Elem], weight: u64) -> Result<()> {
        if pt.len() != self.dim || pt.iter().any(|e| e.0 >= self.q) {
            return Err(Error::Dimension(format!("point is not in F_{}^{}", self.q, self.dim)));
        }
        self.add_index(space::encode_point(self.q, pt), weight);
        Ok(())
    }

    pub fn add_index(&mut self, idx: u64, weight: u64) {
        if weight > 0 {
            *self.counts.entry(idx).or_insert(0) += weight;
            self.total += weight;
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn prob_index(&self, idx: u64) -> BigRational {
        let c = self.counts.get(&idx).copied().unwrap_or(0);
        BigRational::new(c.into(), self.total.max(1).into())
    }

    pub fn prob(&self, pt: &[Elem]) -> BigRational {
        self.prob_index(space::encode_point(self.q, pt))
    }

    /// `supp(X)` as point indices.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.keys().copied()
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Largest point mass as `(count, total)`.
    pub fn max_mass(&self) -> (u64, u64) {
        (self.counts.values().copied().max().unwrap_or(0), self.total)
    }
}

/// `Δ(X, Y)` computed as half the L1 distance, exactly.
pub fn stat_distance(x: &DistributionTable, y: &DistributionTable) -> Result<BigRational> {
    if x.q != y.q || x.dim != y.dim {
        return Err(Error::Dimension(format!(
            "distributions over F_{}^{} and F_{}^{}",
            x.q, x.dim, y.q, y.dim
        )));
    }
    if x.total == 0 || y.total == 0 {
        return Err(Error::Param("empty distribution".into()));
    }
    // sum |a/A - b/B| = sum |aB - bA| / (AB)
    let (ta, tb) = (BigInt::from(x.total), BigInt::from(y.total));
    let mut acc = BigInt::zero();
    let keys: std::collections::BTreeSet<u64> = x.counts.keys().chain(y.counts.keys()).copied().collect();
    for k in keys {
        let a = BigInt::from(x.counts.get(&k).copied().unwrap_or(0));
        let b = BigInt::from(y.counts.get(&k).copied().unwrap_or(0));
        acc += (a * &tb - b * &ta).abs();
    }
    Ok(BigRational::new(acc, ta * tb * 2))
}

/// `-log_q` of the largest point mass.
pub fn min_entropy_q(x: &DistributionTable) -> Result<f64> {
    let (c, total) = x.max_mass();
    if total == 0 {
        return Err(Error::Param("empty distribution".into()));
    }
    Ok(entropy_of(c, total, x.q))
}

fn entropy_of(c: u64, total: u64, q: u64) -> f64 {
    let v = (total as f64 / c as f64).ln() / (q as f64).ln();
    // exact integers print as such: U_{n,q} has entropy n, not n - 1e-16
    if (v - v.round()).abs() < 1e-12 {
        v.round()
    } else {
        v
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BlockResult {
    pub block: usize,
    pub size: usize,
    pub target: f64,
    /// Minimum over prefixes in the support of the conditional min-entropy.
    pub min_conditional_entropy: f64,
    /// A prefix attaining the minimum (point index of the prefix coordinates).
    pub worst_prefix: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BlockReport {
    pub blocks: Vec<BlockResult>,
    pub ok: bool,
}

/// Checks that `x`, split into consecutive blocks of the given sizes, is a
/// block source with conditional min-entropies at least `targets[i] - slack`.
pub fn block_source_check(x: &DistributionTable, sizes: &[usize], targets: &[f64], slack: f64) -> Result<BlockReport> {
    if sizes.iter().sum::<usize>() != x.dim || sizes.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "block sizes {sizes:?} and {} targets for a {}-dimensional distribution",
            targets.len(),
            x.dim
        )));
    }
    let q = x.q;
    let mut blocks = Vec::new();
    let mut before = 0;
    for (i, (&size, &target)) in sizes.iter().zip(targets).enumerate() {
        let after = x.dim - before - size;
        let prefix_div = q.pow((x.dim - before) as u32);
        let suffix_div = q.pow(after as u32);
        let block_mod = q.pow(size as u32);
        // per prefix: (total weight, weight per block value)
        let mut groups: BTreeMap<u64, (u64, BTreeMap<u64, u64>)> = BTreeMap::new();
        for (&idx, &c) in &x.counts {
            let g = groups.entry(idx / prefix_div).or_default();
            g.0 += c;
            *g.1.entry((idx / suffix_div) % block_mod).or_insert(0) += c;
        }
        let (mut worst, mut worst_prefix) = (f64::INFINITY, 0);
        for (prefix, (total, vals)) in &groups {
            let h = entropy_of(vals.values().copied().max().unwrap_or(0), *total, q);
            if h < worst {
                worst = h;
                worst_prefix = *prefix;
            }
        }
        blocks.push(BlockResult {
            block: i,
            size,
            target,
            min_conditional_entropy: worst,
            worst_prefix,
            ok: worst >= target - slack,
        });
        before += size;
    }
    let ok = blocks.iter().all(|b| b.ok);
    Ok(BlockReport { blocks, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn distance_examples() {
        let u = DistributionTable::uniform(2, 1, 16).unwrap();
        let pm = DistributionTable::point_mass(2, &[Elem(0)]).unwrap();
        assert_eq!(stat_distance(&u, &u).unwrap(), r(0, 1));
        assert_eq!(stat_distance(&pm, &u).unwrap(), r(1, 2));
        let u2 = DistributionTable::uniform(2, 2, 16).unwrap();
        let half = DistributionTable::flat(2, 2, &[vec![Elem(0), Elem(0)], vec![Elem(0), Elem(1)]]).unwrap();
        assert_eq!(stat_distance(&u2, &half).unwrap(), r(1, 2));
        assert!(stat_distance(&u, &u2).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(min_entropy_q(&DistributionTable::uniform(3, 4, 1000).unwrap()).unwrap(), 4.0);
        assert_eq!(min_entropy_q(&DistributionTable::point_mass(7, &[Elem(3), Elem(2)]).unwrap()).unwrap(), 0.0);
        let flat: Vec<Vec<Elem>> = (0..5).map(|i| vec![Elem(i), Elem((2 * i) % 5)]).collect();
        assert_eq!(min_entropy_q(&DistributionTable::flat(5, 2, &flat).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn block_examples() {
        let u = DistributionTable::uniform(3, 3, 1000).unwrap();
        let rep = block_source_check(&u, &[1, 2], &[1.0, 2.0], 0.0).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.blocks[1].min_conditional_entropy, 2.0);
        // X2 = X1 over F_2
        let copy = DistributionTable::flat(2, 2, &[vec![Elem(0), Elem(0)], vec![Elem(1), Elem(1)]]).unwrap();
        let rep = block_source_check(&copy, &[1, 1], &[1.0, 1.0], 0.0).unwrap();
        assert_eq!(rep.blocks[0].min_conditional_entropy, 1.0);
        assert_eq!(rep.blocks[1].min_conditional_entropy, 0.0);
        assert!(!rep.ok);
        assert!(block_source_check(&copy, &[1], &[1.0], 0.0).is_err());
    }

    fn table(q: u64, weights: &[u64]) -> DistributionTable {
        let mut t = DistributionTable::empty(q, 2).unwrap();
        for (i, &w) in weights.iter().enumerate() {
            t.add_index(i as u64, w);
        }
        t
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(
            a in proptest::collection::vec(0u64..5, 9),
            b in proptest::collection::vec(0u64..5, 9),
            c in proptest::collection::vec(0u64..5, 9),
        ) {
            prop_assume!(a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0 && c.iter().sum::<u64>() > 0);
            let (x, y, z) = (table(3, &a), table(3, &b), table(3, &c));
            let xy = stat_distance(&x, &y).unwrap();
            prop_assert_eq!(&xy, &stat_distance(&y, &x).unwrap());
            prop_assert!(xy <= stat_distance(&x, &z).unwrap() + stat_distance(&z, &y).unwrap());
            prop_assert!(xy >= r(0, 1) && xy <= r(1, 1));
            prop_assert_eq!(stat_distance(&x, &x).unwrap(), r(0, 1));
        }
    }
}
