//! Test-set families `A ⊆ F_q^m` with exactly known sizes.
//!
//! A [`Family`] maps each point to the indices of the members containing
//! it, so one pass over a sample set fills the hit counts of every member.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::space;

/// Largest number of members a single dyadic level may have.
const DYADIC_LEVEL_MAX: u64 = 1 << 16;
/// Largest prefix space a random set is tabulated on.
const RANDOM_PREFIX_MAX: u64 = 1 << 20;

/// Description of a family, independent of the field and dimension.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `{x : x_i = c}` for every coordinate i and value c.
    Hyperplanes,
    /// Products of dyadic intervals of the integer encoding, per level.
    Dyadic,
    /// Hamming balls of every radius below m around a few centres.
    Hamming { centers: usize, seed: u64 },
    /// Seeded random sets of density about 1/2; beyond `2^20` points the set
    /// is a cylinder over the longest prefix that fits.
    Random { count: usize, seed: u64 },
    /// Unions of `floor(q/2)` random curves of the given degree.
    Curves { count: usize, degree: usize, seed: u64 },
    /// One explicit set given by its points (integer-encoded coordinates).
    Explicit { points: Vec<Vec<u64>> },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Hyperplanes => "hyperplanes",
            FamilySpec::Dyadic => "dyadic",
            FamilySpec::Hamming { .. } => "hamming",
            FamilySpec::Random { .. } => "random",
            FamilySpec::Curves { .. } => "curves",
            FamilySpec::Explicit { .. } => "explicit",
        }
    }

    /// The built-in families with default parameters.
    pub fn defaults(seed: u64) -> Vec<FamilySpec> {
        vec![
            FamilySpec::Hyperplanes,
            FamilySpec::Dyadic,
            FamilySpec::Hamming { centers: 2, seed },
            FamilySpec::Random { count: 4, seed },
            FamilySpec::Curves { count: 2, degree: 1, seed },
        ]
    }

    /// Parses `hyperplanes`, `dyadic`, `hamming`, `random`, `curves[:degree]`,
    /// `explicit:0,1;2,3` or `all` (comma separated lists are allowed
    /// between families with `+`).
    pub fn parse_list(text: &str, seed: u64) -> Result<Vec<FamilySpec>> {
        let mut out = Vec::new();
        for part in text.split('+').map(str::trim) {
            let (head, arg) = part.split_once(':').unwrap_or((part, ""));
            match head {
                "all" => out.extend(FamilySpec::defaults(seed)),
                "hyperplanes" => out.push(FamilySpec::Hyperplanes),
                "dyadic" => out.push(FamilySpec::Dyadic),
                "hamming" => out.push(FamilySpec::Hamming { centers: 2, seed }),
                "random" => out.push(FamilySpec::Random { count: 4, seed }),
                "curves" => {
                    let degree = if arg.is_empty() {
                        1
                    } else {
                        arg.parse().map_err(|_| Error::Parse(format!("bad curve degree {arg:?}")))?
                    };
                    out.push(FamilySpec::Curves { count: 2, degree, seed });
                }
                "explicit" => {
                    let points = arg
                        .split(';')
                        .filter(|p| !p.trim().is_empty())
                        .map(|p| {
                            p.split(',')
                                .map(|c| c.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad point {p:?}"))))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    out.push(FamilySpec::Explicit { points });
                }
                _ => return Err(Error::Parse(format!("unknown subset family {head:?}"))),
            }
        }
        Ok(out)
    }
}

/// One set of a family with its exact size.
#[derive(Clone, Debug, Serialize)]
pub struct Member {
    pub id: String,
    pub params: Value,
    #[serde(skip)]
    pub size: BigUint,
}

enum Index {
    Hyperplanes,
    /// `(level, first member index)` per level
    Dyadic(Vec<(u32, usize)>),
    Hamming(Vec<Vec<Elem>>),
    /// prefix length and one bitmap per member
    Random(usize, Vec<Vec<bool>>),
    Lookup(Vec<HashSet<u128>>),
}

/// A family instantiated over `F_q^m`.
pub struct Family {
    spec: FamilySpec,
    q: u64,
    m: usize,
    members: Vec<Member>,
    index: Index,
}

fn key(q: u64, pt: &[Elem]) -> u128 {
    pt.iter().fold(0u128, |acc, e| acc * q as u128 + e.0 as u128)
}

fn binom(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

impl Family {
    pub fn new(spec: &FamilySpec, field: &Field, m: usize) -> Result<Family> {
        if m == 0 {
            return Err(Error::Param("subsets need m >= 1".into()));
        }
        let q = field.q();
        let (members, index) = match spec {
            FamilySpec::Hyperplanes => {
                let size = BigUint::from(q).pow(m as u32 - 1);
                let members = (0..m)
                    .flat_map(|i| {
                        let size = size.clone();
                        (0..q).map(move |c| Member {
                            id: format!("x{i}={c}"),
                            params: json!({"coordinate": i, "value": c}),
                            size: size.clone(),
                        })
                    })
                    .collect();
                (members, Index::Hyperplanes)
            }
            FamilySpec::Dyadic => {
                let mut members = Vec::new();
                let mut levels = Vec::new();
                let mut level = 1u32;
                while level < 64 && (1u64 << level) <= q {
                    let per_level = (1u128 << level).checked_pow(m as u32);
                    if per_level.is_none_or(|c| c > DYADIC_LEVEL_MAX as u128) {
                        break;
                    }
                    let cells = 1u64 << level;
                    // number of field elements in each interval of this level
                    let widths: Vec<u64> = (0..cells)
                        .map(|j| (j + 1).saturating_mul(q).div_ceil(cells) - j.saturating_mul(q).div_ceil(cells))
                        .collect();
                    levels.push((level, members.len()));
                    for b in 0..cells.pow(m as u32) {
                        let coords = space::point(cells, b, m);
                        let size = coords.iter().fold(BigUint::one(), |acc, c| acc * widths[c.0 as usize]);
                        members.push(Member {
                            id: format!("L{level}:{}", coords.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")),
                            params: json!({"level": level, "box": coords.iter().map(|c| c.0).collect::<Vec<_>>()}),
                            size,
                        });
                    }
                    level += 1;
                }
                (members, Index::Dyadic(levels))
            }
            FamilySpec::Hamming { centers, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let cs: Vec<Vec<Elem>> = (0..(*centers).max(1))
                    .map(|c| {
                        if c == 0 {
                            vec![Elem::ZERO; m]
                        } else {
                            (0..m).map(|_| Elem(rng.random_range(0..q))).collect()
                        }
                    })
                    .collect();
                let mut members = Vec::new();
                for (ci, c) in cs.iter().enumerate() {
                    for r in 0..m {
                        let size = (0..=r).fold(BigUint::zero(), |acc, i| {
                            acc + binom(m, i) * BigUint::from(q - 1).pow(i as u32)
                        });
                        members.push(Member {
                            id: format!("ball{ci}:r{r}"),
                            params: json!({"center": c.iter().map(|e| e.0).collect::<Vec<_>>(), "radius": r}),
                            size,
                        });
                    }
                }
                (members, Index::Hamming(cs))
            }
            FamilySpec::Random { count, seed } => {
                let mut j = 0;
                while j < m && space::point_count(q, j + 1).is_some_and(|c| c <= RANDOM_PREFIX_MAX) {
                    j += 1;
                }
                if j == 0 {
                    return Err(Error::Param(format!("random sets need q <= {RANDOM_PREFIX_MAX}")));
                }
                let cells = q.pow(j as u32);
                let mut members = Vec::new();
                let mut maps = Vec::new();
                for i in 0..*count {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(i as u64);
                    let bits: Vec<bool> = (0..cells).map(|_| rng.random::<bool>()).collect();
                    let hits = bits.iter().filter(|&&b| b).count() as u64;
                    members.push(Member {
                        id: format!("random{i}"),
                        params: json!({"seed": seed, "stream": i, "prefix": j}),
                        size: BigUint::from(hits) * BigUint::from(q).pow((m - j) as u32),
                    });
                    maps.push(bits);
                }
                (members, Index::Random(j, maps))
            }
            FamilySpec::Curves { count, degree, seed } => {
                check_lookup(q, m)?;
                let k = (q / 2).max(1);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut members = Vec::new();
                let mut sets = Vec::new();
                for i in 0..*count {
                    let mut set = HashSet::new();
                    for _ in 0..k {
                        let coeffs: Vec<Vec<Elem>> = (0..m)
                            .map(|_| (0..=*degree).map(|_| Elem(rng.random_range(0..q))).collect())
                            .collect();
                        for y in field.elements() {
                            let pt: Vec<Elem> = coeffs.iter().map(|c| field.horner(c, y)).collect();
                            set.insert(key(q, &pt));
                        }
                    }
                    members.push(Member {
                        id: format!("curves{i}"),
                        params: json!({"curves": k, "degree": degree, "seed": seed, "index": i}),
                        size: BigUint::from(set.len()),
                    });
                    sets.push(set);
                }
                (members, Index::Lookup(sets))
            }
            FamilySpec::Explicit { points } => {
                check_lookup(q, m)?;
                let mut set = HashSet::new();
                for p in points {
                    if p.len() != m || p.iter().any(|&c| c >= q) {
                        return Err(Error::Param(format!("point {p:?} is not in F_{q}^{m}")));
                    }
                    set.insert(key(q, &p.iter().map(|&c| Elem(c)).collect::<Vec<_>>()));
                }
                let member = Member {
                    id: "explicit".into(),
                    params: json!({"points": points.len()}),
                    size: BigUint::from(set.len()),
                };
                (vec![member], Index::Lookup(vec![set]))
            }
        };
        Ok(Family { spec: spec.clone(), q, m, members, index })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// `|A| / q^m`
    pub fn density(&self, member: usize) -> BigRational {
        BigRational::new(
            self.members[member].size.clone().into(),
            BigUint::from(self.q).pow(self.m as u32).into(),
        )
    }

    /// Appends the indices of all members containing `pt`.
    pub fn incidences(&self, pt: &[Elem], out: &mut Vec<u32>) {
        let q = self.q;
        match &self.index {
            Index::Hyperplanes => {
                out.extend(pt.iter().enumerate().map(|(i, c)| (i as u64 * q + c.0) as u32));
            }
            Index::Dyadic(levels) => {
                for &(level, start) in levels {
                    let cells = 1u128 << level;
                    let b = pt
                        .iter()
                        .fold(0u128, |acc, c| acc * cells + (c.0 as u128 * cells) / q as u128);
                    out.push((start as u128 + b) as u32);
                }
            }
            Index::Hamming(centers) => {
                let m = self.m;
                for (ci, c) in centers.iter().enumerate() {
                    let dist = c.iter().zip(pt).filter(|(a, b)| a != b).count();
                    out.extend((dist..m).map(|r| (ci * m + r) as u32));
                }
            }
            Index::Random(j, maps) => {
                let cell = space::encode_point(q, &pt[..*j]) as usize;
                out.extend(maps.iter().enumerate().filter(|(_, b)| b[cell]).map(|(i, _)| i as u32));
            }
            Index::Lookup(sets) => {
                let k = key(q, pt);
                out.extend(sets.iter().enumerate().filter(|(_, s)| s.contains(&k)).map(|(i, _)| i as u32));
            }
        }
    }

    pub fn contains(&self, member: usize, pt: &[Elem]) -> bool {
        let mut buf = Vec::new();
        self.incidences(pt, &mut buf);
        buf.contains(&(member as u32))
    }
}

fn check_lookup(q: u64, m: usize) -> Result<()> {
    let bits = (q as f64).log2() * m as f64;
    if bits >= 127.0 {
        return Err(Error::Param(format!("point sets over F_{q}^{m} are too large to index")));
    }
    Ok(())
}

/// `(μ(A), μ_T(A))` for member `member` of `family` and the multiset `t`.
pub fn densities(family: &Family, member: usize, t: &[Vec<Elem>]) -> Result<(BigRational, BigRational)> {
    if t.is_empty() {
        return Err(Error::Param("empty sample".into()));
    }
    let hits = t.iter().filter(|p| family.contains(member, p)).count();
    Ok((family.density(member), BigRational::new(hits.into(), t.len().into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Checks every member's recorded size against a direct count.
    fn sizes_by_enumeration(spec: &FamilySpec, q: u64, m: usize) {
        let f = Field::parse(&q.to_string()).unwrap();
        let fam = Family::new(spec, &f, m).unwrap();
        let mut counts = vec![0u64; fam.members().len()];
        let mut buf = Vec::new();
        for i in 0..q.pow(m as u32) {
            buf.clear();
            fam.incidences(&space::point(q, i, m), &mut buf);
            let mut seen = buf.clone();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), buf.len(), "duplicate incidences");
            for &j in &buf {
                counts[j as usize] += 1;
            }
        }
        for (mem, c) in fam.members().iter().zip(counts) {
            assert_eq!(mem.size, BigUint::from(c), "{} {}", spec.name(), mem.id);
        }
    }

    #[test]
    fn member_sizes_are_exact() {
        for (q, m) in [(5, 2), (8, 2), (9, 2), (4, 3), (32, 1), (7, 3)] {
            for spec in FamilySpec::defaults(7) {
                sizes_by_enumeration(&spec, q, m);
            }
            sizes_by_enumeration(&FamilySpec::Curves { count: 2, degree: 2, seed: 3 }, q, m);
            sizes_by_enumeration(&FamilySpec::Explicit { points: vec![vec![0; m], vec![1; m], vec![0; m]] }, q, m);
        }
    }

    #[test]
    fn dyadic_levels_at_q32() {
        let f = Field::new(2, 5).unwrap();
        let fam = Family::new(&FamilySpec::Dyadic, &f, 2).unwrap();
        // levels 1..5 with 4, 16, 64, 256, 1024 boxes
        assert_eq!(fam.members().len(), 4 + 16 + 64 + 256 + 1024);
        assert_eq!(fam.density(0), BigRational::new(1.into(), 4.into()));
        let fam = Family::new(&FamilySpec::Hyperplanes, &f, 2).unwrap();
        assert_eq!(fam.members().len(), 64);
        assert_eq!(fam.density(3), BigRational::new(1.into(), 32.into()));
    }

    #[test]
    fn densities_examples() {
        let f = Field::new(3, 1).unwrap();
        let zero = Family::new(&FamilySpec::Explicit { points: vec![vec![0]] }, &f, 1).unwrap();
        let t: Vec<Vec<Elem>> = (0..3).map(|i| vec![Elem(i)]).collect();
        let (mu, mu_t) = densities(&zero, 0, &t).unwrap();
        assert_eq!(mu, BigRational::new(1.into(), 3.into()));
        assert_eq!(mu_t, BigRational::new(1.into(), 3.into()));
        let empty = Family::new(&FamilySpec::Explicit { points: vec![] }, &f, 1).unwrap();
        assert!(densities(&empty, 0, &t).unwrap().1.is_zero());
        let all = Family::new(&FamilySpec::Explicit { points: vec![vec![0], vec![1], vec![2]] }, &f, 1).unwrap();
        let (mu, mu_t) = densities(&all, 0, &t).unwrap();
        assert!(mu.is_one() && mu_t.is_one());
        assert!(densities(&all, 0, &[]).is_err());
    }

    #[test]
    fn parse_family_lists() {
        let v = FamilySpec::parse_list("hyperplanes+curves:2+explicit:0,1;2,3", 5).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1], FamilySpec::Curves { count: 2, degree: 2, seed: 5 });
        assert_eq!(v[2], FamilySpec::Explicit { points: vec![vec![0, 1], vec![2, 3]] });
        assert_eq!(FamilySpec::parse_list("all", 1).unwrap().len(), 5);
        assert!(FamilySpec::parse_list("balls", 1).is_err());
    }
}
