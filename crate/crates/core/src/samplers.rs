//! Samplers `S: F_q^n x F_q^d -> F_q^m` and their combinators.
//!
//! A [`SamplerSpec`] is an immutable evaluator tree. Leaves are the basic
//! line and curve samplers (possibly over an extension field, flattened to
//! F_q coordinates), the Reed-Solomon condenser and a few wiring
//! primitives; inner nodes are error reduction (`star`), iterated sampling
//! (`circ`), projection and block-source composition. Every node also
//! knows how to expand itself into a [`PolyMap`] over `(x, y)` so that
//! degrees can be measured symbolically at small sizes.
//!
//! Randomness is laid out as the concatenation the combinators describe:
//! `star(S, f)` takes the seed `(y_f, y_S)`; `circ(S1, S2)` takes the
//! randomness `(x_1, x_2)`. Extension-field coordinates are flattened in
//! the basis recorded by their [`Extension`].

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{Elem, Extension, Field};
use crate::polymap::{Poly, PolyMap};
use crate::space;

/// Version tag carried by every JSON document this crate writes.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug)]
pub(crate) enum Node {
    Line { m: usize, ext: Arc<Extension> },
    Curve { m: usize, t: usize, ext: Arc<Extension> },
    RsCon { n: usize, m: usize, ext: Arc<Extension>, zeta_pows: Vec<Elem> },
    BlkCnvt { n: usize, parts: Vec<SamplerSpec> },
    BlkExt { parts: Vec<SamplerSpec> },
    Star { sampler: SamplerSpec, source: SamplerSpec },
    Circ { outer: SamplerSpec, inner: SamplerSpec },
    Project { base: SamplerSpec },
    SeedProjection,
    Passthrough,
    Poly(Arc<PolyMap>),
    Permute { base: SamplerSpec, perm: Vec<usize> },
    Named { kind: String, params: BTreeMap<String, Value>, base: SamplerSpec },
}

/// A sampler together with its evaluator tree and declared degree.
#[derive(Clone, Debug)]
pub struct SamplerSpec {
    field: Field,
    n: usize,
    d: usize,
    m: usize,
    degree: u64,
    node: Arc<Node>,
}

impl SamplerSpec {
    pub(crate) fn from_node(field: &Field, n: usize, d: usize, m: usize, degree: u64, node: Node) -> SamplerSpec {
        SamplerSpec { field: field.clone(), n, d, m, degree, node: Arc::new(node) }
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Randomness coordinates.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Seed coordinates.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Output coordinates.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Declared bound on the total degree as a polynomial map in `(x, y)`.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Declared bound on the degree of `y -> S(x, y)` for fixed `x`.
    pub fn curve_degree(&self) -> u64 {
        match self.node() {
            Node::Line { .. } => 1,
            Node::Curve { t, .. } => (*t as u64).saturating_sub(1),
            Node::Named { base, .. } => base.curve_degree(),
            _ => self.degree,
        }
    }

    /// Number of seeds, q^d.
    pub fn seed_count(&self) -> Option<u64> {
        space::point_count(self.field.q(), self.d)
    }

    /// Checked evaluation.
    pub fn eval(&self, x: &[Elem], y: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.n || y.len() != self.d {
            return Err(Error::Dimension(format!(
                "sampler takes ({}, {}) coordinates, got ({}, {})",
                self.n,
                self.d,
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(y).any(|&v| !self.field.contains(v)) {
            return Err(Error::Param(format!("coordinate outside F_{}", self.field.q())));
        }
        let mut out = vec![Elem::ZERO; self.m];
        self.eval_into(x, y, &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into `out` (length m).
    pub fn eval_into(&self, x: &[Elem], y: &[Elem], out: &mut [Elem]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.d);
        debug_assert_eq!(out.len(), self.m);
        match self.node() {
            Node::Line { m, ext } => {
                let dd = ext.degree();
                let k = ext.ext();
                let yy = ext.lift(y);
                for j in 0..*m {
                    let a = ext.lift(&x[j * dd..(j + 1) * dd]);
                    let b = ext.lift(&x[(m + j) * dd..(m + j + 1) * dd]);
                    ext.flatten_into(k.add(k.mul(a, yy), b), &mut out[j * dd..(j + 1) * dd]);
                }
            }
            Node::Curve { m, t, ext } => {
                let dd = ext.degree();
                let k = ext.ext();
                let yy = ext.lift(y);
                for j in 0..*m {
                    let mut acc = Elem::ZERO;
                    for i in (0..*t).rev() {
                        let at = (i * m + j) * dd;
                        acc = k.add(k.mul(acc, yy), ext.lift(&x[at..at + dd]));
                    }
                    ext.flatten_into(acc, &mut out[j * dd..(j + 1) * dd]);
                }
            }
            Node::RsCon { n, ext, zeta_pows, .. } => {
                let dd = ext.degree();
                let k = ext.ext();
                let coeffs: Vec<Elem> = (0..*n).map(|i| ext.lift(&x[i * dd..(i + 1) * dd])).collect();
                out[..dd].copy_from_slice(y);
                let yy = ext.lift(y);
                for (j, &z) in zeta_pows.iter().enumerate() {
                    let v = k.horner(&coeffs, k.mul(z, yy));
                    ext.flatten_into(v, &mut out[(j + 1) * dd..(j + 2) * dd]);
                }
            }
            Node::BlkCnvt { parts, .. } => {
                let mut off = 0;
                for (i, part) in parts.iter().enumerate() {
                    part.eval_into(x, &y[i..i + 1], &mut out[off..off + part.m]);
                    off += part.m;
                }
            }
            Node::BlkExt { parts } => blkext_eval(parts, |i, xi, yi, o| parts[i].eval_into(xi, yi, o), x, y, out),
            Node::Star { sampler, source } => {
                let mut mid = vec![Elem::ZERO; source.m];
                source.eval_into(x, &y[..source.d], &mut mid);
                sampler.eval_into(&mid, &y[source.d..], out);
            }
            Node::Circ { outer, inner } => {
                let mut mid = vec![Elem::ZERO; inner.m];
                inner.eval_into(&x[outer.n..], y, &mut mid);
                outer.eval_into(&x[..outer.n], &mid, out);
            }
            Node::Project { base } => {
                let mut full = vec![Elem::ZERO; base.m];
                base.eval_into(x, y, &mut full);
                out.copy_from_slice(&full[..self.m]);
            }
            Node::SeedProjection => out.copy_from_slice(&y[..self.m]),
            Node::Passthrough => out.copy_from_slice(x),
            Node::Poly(map) => {
                let xy: Vec<Elem> = x.iter().chain(y).copied().collect();
                for (o, c) in out.iter_mut().zip(map.components()) {
                    *o = c.eval(&self.field, &xy);
                }
            }
            Node::Permute { base, perm } => {
                let px: Vec<Elem> = perm.iter().map(|&i| x[i]).collect();
                base.eval_into(&px, y, out);
            }
            Node::Named { base, .. } => base.eval_into(x, y, out),
        }
    }

    /// Fixes the randomness `x`, precomputing whatever does not depend on
    /// the seed. Use this when evaluating many seeds for one `x`.
    pub fn bind(&self, x: &[Elem]) -> BoundSampler<'_> {
        debug_assert_eq!(x.len(), self.n);
        let kind = match self.node() {
            Node::RsCon { n, ext, .. } if ext.ext().q() <= RSCON_TABLE_MAX => {
                let dd = ext.degree();
                let k = ext.ext();
                let coeffs: Vec<Elem> = (0..*n).map(|i| ext.lift(&x[i * dd..(i + 1) * dd])).collect();
                BoundKind::RsConTable(k.elements().map(|z| k.horner(&coeffs, z)).collect())
            }
            Node::BlkCnvt { parts, .. } => BoundKind::Parts(parts.iter().map(|p| p.bind(x)).collect()),
            Node::BlkExt { parts } => {
                let mut off = 0;
                BoundKind::Parts(
                    parts
                        .iter()
                        .map(|p| {
                            let b = p.bind(&x[off..off + p.n]);
                            off += p.n;
                            b
                        })
                        .collect(),
                )
            }
            Node::Star { source, .. } => BoundKind::Parts(vec![source.bind(x)]),
            Node::Circ { outer, inner } => {
                BoundKind::Parts(vec![outer.bind(&x[..outer.n]), inner.bind(&x[outer.n..])])
            }
            Node::Project { base } | Node::Named { base, .. } => BoundKind::Parts(vec![base.bind(x)]),
            Node::Permute { base, perm } => {
                let px: Vec<Elem> = perm.iter().map(|&i| x[i]).collect();
                BoundKind::Permuted(Box::new(base.bind(&px)))
            }
            _ => BoundKind::Plain(x.to_vec()),
        };
        BoundSampler { spec: self, kind }
    }

    /// The indexed sample `S(x) = (S(x, y))_y` in lexicographic seed order,
    /// flattened into `buf` (q^d rows of m coordinates).
    pub fn sample_set_into(&self, x: &[Elem], buf: &mut Vec<Elem>) {
        let q = self.field.q();
        let count = self.seed_count().expect("seed space fits in u64");
        buf.clear();
        buf.resize(count as usize * self.m, Elem::ZERO);
        let bound = self.bind(x);
        let mut seed = vec![Elem::ZERO; self.d];
        for (idx, row) in buf.chunks_mut(self.m.max(1)).enumerate().take(count as usize) {
            space::decode_point(q, idx as u64, &mut seed);
            bound.eval_into(&seed, &mut row[..self.m]);
        }
    }

    /// `sample_set`: one point per seed, in lexicographic seed order.
    pub fn sample_set(&self, x: &[Elem]) -> Result<Vec<Vec<Elem>>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("randomness has {} coordinates, expected {}", x.len(), self.n)));
        }
        let mut buf = Vec::new();
        self.sample_set_into(x, &mut buf);
        if self.m == 0 {
            return Ok(vec![Vec::new(); self.seed_count().unwrap_or(0) as usize]);
        }
        Ok(buf.chunks(self.m).map(<[Elem]>::to_vec).collect())
    }

    /// Symbolic form over the variables `(x, y)`; fails once any intermediate
    /// polynomial exceeds `cap` terms.
    pub fn to_polymap(&self, cap: usize) -> Result<PolyMap> {
        let f = &self.field;
        let arity = self.n + self.d;
        match self.node() {
            Node::Line { m, ext } => {
                let k = ext.ext();
                let big_arity = 2 * m + 1;
                let comps = (0..*m)
                    .map(|j| {
                        let ay = Poly::var(big_arity, j).mul(&Poly::var(big_arity, 2 * m), k, cap)?;
                        Ok(ay.add(&Poly::var(big_arity, m + j), k))
                    })
                    .collect::<Result<Vec<_>>>()?;
                PolyMap::new(k, big_arity, comps)?.flatten_map(ext, cap)
            }
            Node::Curve { m, t, ext } => {
                let k = ext.ext();
                let big_arity = t * m + 1;
                let comps = (0..*m)
                    .map(|j| {
                        (0..*t).try_fold(Poly::zero(big_arity), |acc, i| {
                            let term = Poly::var(big_arity, i * m + j)
                                .mul(&Poly::monomial(big_arity, t * m, i as u32, Elem::ONE), k, cap)?;
                            Ok::<_, Error>(acc.add(&term, k))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                PolyMap::new(k, big_arity, comps)?.flatten_map(ext, cap)
            }
            Node::RsCon { n, ext, zeta_pows, .. } => {
                let k = ext.ext();
                let big_arity = n + 1;
                let mut comps = vec![Poly::var(big_arity, *n)];
                for &z in zeta_pows {
                    let mut acc = Poly::zero(big_arity);
                    for i in 0..*n {
                        let c = k.pow(z, i as u64);
                        let term = Poly::var(big_arity, i)
                            .mul(&Poly::monomial(big_arity, *n, i as u32, c), k, cap)?;
                        acc = acc.add(&term, k);
                    }
                    comps.push(acc);
                }
                PolyMap::new(k, big_arity, comps)?.flatten_map(ext, cap)
            }
            Node::BlkCnvt { n, parts } => {
                let mut comps = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    let pm = part.to_polymap(cap)?;
                    let map: Vec<usize> = (0..*n).chain([n + i]).collect();
                    comps.extend(pm.components().iter().map(|c| c.remap(f, arity, &map)));
                }
                PolyMap::new(f, arity, comps)
            }
            Node::BlkExt { parts } => {
                let offsets = prefix_offsets(parts.iter().map(|p| p.n));
                let s = parts.len();
                let mut seed: Vec<Poly> = (0..self.d).map(|j| Poly::var(arity, self.n + j)).collect();
                let mut blocks: Vec<Vec<Poly>> = vec![Vec::new(); s];
                for i in (0..s).rev() {
                    let part = &parts[i];
                    let pm = part.to_polymap(cap)?;
                    let subs: Vec<Poly> = (0..part.n)
                        .map(|j| Poly::var(arity, offsets[i] + j))
                        .chain(seed.iter().cloned())
                        .collect();
                    let out = pm.substitute(&subs, arity, cap)?.into_components();
                    let prev_d = if i > 0 { parts[i - 1].d } else { 0 };
                    blocks[i] = out[prev_d..].to_vec();
                    seed = out[..prev_d].to_vec();
                }
                PolyMap::new(f, arity, blocks.concat())
            }
            Node::Star { sampler, source } => {
                let inner = source.to_polymap(cap)?;
                let src_arity = source.n + source.d;
                let ident: Vec<usize> = (0..src_arity).collect();
                let subs: Vec<Poly> = inner
                    .components()
                    .iter()
                    .map(|c| c.remap(f, arity, &ident))
                    .chain((0..sampler.d).map(|j| Poly::var(arity, src_arity + j)))
                    .collect();
                sampler.to_polymap(cap)?.substitute(&subs, arity, cap)
            }
            Node::Circ { outer, inner } => {
                let ipm = inner.to_polymap(cap)?;
                let map: Vec<usize> = (outer.n..arity).collect();
                let subs: Vec<Poly> = (0..outer.n)
                    .map(|j| Poly::var(arity, j))
                    .chain(ipm.components().iter().map(|c| c.remap(f, arity, &map)))
                    .collect();
                outer.to_polymap(cap)?.substitute(&subs, arity, cap)
            }
            Node::Project { base } => Ok(base.to_polymap(cap)?.truncate(self.m)),
            Node::SeedProjection => {
                PolyMap::new(f, arity, (0..self.m).map(|j| Poly::var(arity, self.n + j)).collect())
            }
            Node::Passthrough => Ok(PolyMap::identity(f, arity)),
            Node::Poly(map) => Ok((**map).clone()),
            Node::Permute { base, perm } => {
                let subs: Vec<Poly> = perm
                    .iter()
                    .map(|&i| Poly::var(arity, i))
                    .chain((0..self.d).map(|j| Poly::var(arity, self.n + j)))
                    .collect();
                base.to_polymap(cap)?.substitute(&subs, arity, cap)
            }
            Node::Named { base, .. } => base.to_polymap(cap),
        }
    }

    /// Construction tree for reports.
    pub fn provenance(&self) -> Provenance {
        let (kind, params, children): (&str, BTreeMap<String, Value>, Vec<&SamplerSpec>) = match self.node() {
            Node::Line { m, ext } => ("line", params([("m", (*m).into()), ("field_degree", ext.degree().into())]), vec![]),
            Node::Curve { m, t, ext } => (
                "curve",
                params([("m", (*m).into()), ("t", (*t).into()), ("field_degree", ext.degree().into())]),
                vec![],
            ),
            Node::RsCon { n, m, ext, .. } => (
                "rscon",
                params([("n", (*n).into()), ("m", (*m).into()), ("field_degree", ext.degree().into())]),
                vec![],
            ),
            Node::BlkCnvt { n, parts } => (
                "blkcnvt",
                params([
                    ("n", (*n).into()),
                    ("blocks", parts.iter().map(|p| p.m).collect::<Vec<_>>().into()),
                ]),
                vec![],
            ),
            Node::BlkExt { parts } => ("blkext", BTreeMap::new(), parts.iter().collect()),
            Node::Star { sampler, source } => ("star", BTreeMap::new(), vec![sampler, source]),
            Node::Circ { outer, inner } => ("circ", BTreeMap::new(), vec![outer, inner]),
            Node::Project { base } => ("project", params([("m", self.m.into())]), vec![base]),
            Node::SeedProjection => ("seed_projection", BTreeMap::new(), vec![]),
            Node::Passthrough => ("passthrough", BTreeMap::new(), vec![]),
            Node::Poly(map) => ("polymap", params([("terms", map.num_terms().into())]), vec![]),
            Node::Permute { base, perm } => ("permute", params([("perm", perm.clone().into())]), vec![base]),
            Node::Named { kind, params, base } => (kind.as_str(), params.clone(), vec![base]),
        };
        Provenance {
            kind: kind.to_string(),
            params,
            n: self.n,
            d: self.d,
            m: self.m,
            degree: self.degree,
            children: children.into_iter().map(SamplerSpec::provenance).collect(),
        }
    }

    pub fn descriptor(&self) -> SamplerDescriptor {
        SamplerDescriptor {
            schema_version: SCHEMA_VERSION.to_string(),
            field: self.field.spec().to_text(),
            n: self.n,
            d: self.d,
            m: self.m,
            declared_degree: self.degree,
            declared_curve_degree: self.curve_degree(),
            provenance: self.provenance(),
        }
    }

    /// Parameters attached by [`named`] at the root, if any.
    pub fn label(&self) -> Option<(&str, &BTreeMap<String, Value>)> {
        match self.node() {
            Node::Named { kind, params, .. } => Some((kind.as_str(), params)),
            _ => None,
        }
    }

    /// The root node after stripping labels.
    pub fn unlabelled(&self) -> &SamplerSpec {
        match self.node() {
            Node::Named { base, .. } => base.unlabelled(),
            _ => self,
        }
    }

    /// Basic-sampler parameters `(m, t)` when this is `Line` (t = 2) or `Curve`.
    pub fn basic_shape(&self) -> Option<(&'static str, usize, usize, u64)> {
        match self.unlabelled().node() {
            Node::Line { m, ext } => Some(("line", *m, 2, ext.ext().q())),
            Node::Curve { m, t, ext } => Some(("curve", *m, *t, ext.ext().q())),
            _ => None,
        }
    }
}

const RSCON_TABLE_MAX: u64 = 1 << 12;

fn params<const N: usize>(kv: [(&str, Value); N]) -> BTreeMap<String, Value> {
    kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn prefix_offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .map(|s| {
            let o = acc;
            acc += s;
            o
        })
        .collect()
}

/// Threads seeds right to left through the parts: part i produces
/// `(y_{i-1}, z_i)`, with the prefix feeding part i-1.
fn blkext_eval(
    parts: &[SamplerSpec],
    mut eval: impl FnMut(usize, &[Elem], &[Elem], &mut [Elem]),
    x: &[Elem],
    y: &[Elem],
    out: &mut [Elem],
) {
    let x_off = prefix_offsets(parts.iter().map(|p| p.n));
    let z_len: Vec<usize> = parts
        .iter()
        .enumerate()
        .map(|(i, p)| p.m - if i > 0 { parts[i - 1].d } else { 0 })
        .collect();
    let z_off = prefix_offsets(z_len.iter().copied());
    let mut seed = y.to_vec();
    for i in (0..parts.len()).rev() {
        let p = &parts[i];
        let mut tmp = vec![Elem::ZERO; p.m];
        let xi = &x[x_off[i]..x_off[i] + p.n];
        eval(i, xi, &seed, &mut tmp);
        let prev_d = p.m - z_len[i];
        out[z_off[i]..z_off[i] + z_len[i]].copy_from_slice(&tmp[prev_d..]);
        seed = tmp[..prev_d].to_vec();
    }
}

enum BoundKind<'a> {
    Plain(Vec<Elem>),
    RsConTable(Vec<Elem>),
    Parts(Vec<BoundSampler<'a>>),
    Permuted(Box<BoundSampler<'a>>),
}

/// A sampler with its randomness fixed; see [`SamplerSpec::bind`].
pub struct BoundSampler<'a> {
    spec: &'a SamplerSpec,
    kind: BoundKind<'a>,
}

impl BoundSampler<'_> {
    pub fn eval_into(&self, y: &[Elem], out: &mut [Elem]) {
        let spec = self.spec;
        match (&self.kind, spec.node()) {
            (BoundKind::Plain(x), _) => spec.eval_into(x, y, out),
            (BoundKind::RsConTable(table), Node::RsCon { ext, zeta_pows, .. }) => {
                let dd = ext.degree();
                let k = ext.ext();
                out[..dd].copy_from_slice(y);
                let yy = ext.lift(y);
                for (j, &z) in zeta_pows.iter().enumerate() {
                    let v = table[k.mul(z, yy).0 as usize];
                    ext.flatten_into(v, &mut out[(j + 1) * dd..(j + 2) * dd]);
                }
            }
            (BoundKind::Parts(b), Node::BlkCnvt { parts, .. }) => {
                let mut off = 0;
                for (i, (bp, part)) in b.iter().zip(parts).enumerate() {
                    bp.eval_into(&y[i..i + 1], &mut out[off..off + part.m]);
                    off += part.m;
                }
            }
            (BoundKind::Parts(b), Node::BlkExt { parts }) => {
                let dummy: Vec<Elem> = vec![Elem::ZERO; spec.n];
                blkext_eval(parts, |i, _, yi, o| b[i].eval_into(yi, o), &dummy, y, out)
            }
            (BoundKind::Parts(b), Node::Star { sampler, source }) => {
                let mut mid = vec![Elem::ZERO; source.m];
                b[0].eval_into(&y[..source.d], &mut mid);
                sampler.eval_into(&mid, &y[source.d..], out);
            }
            (BoundKind::Parts(b), Node::Circ { inner, .. }) => {
                let mut mid = vec![Elem::ZERO; inner.m];
                b[1].eval_into(y, &mut mid);
                b[0].eval_into(&mid, out);
            }
            (BoundKind::Parts(b), Node::Project { base }) => {
                let mut full = vec![Elem::ZERO; base.m];
                b[0].eval_into(y, &mut full);
                out.copy_from_slice(&full[..spec.m]);
            }
            (BoundKind::Parts(b), Node::Named { .. }) => b[0].eval_into(y, out),
            (BoundKind::Permuted(b), _) => b.eval_into(y, out),
            _ => unreachable!("bound evaluator does not match its node"),
        }
    }
}

/// Node of the construction tree written into sampler descriptors.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Provenance {
    pub kind: String,
    pub params: BTreeMap<String, Value>,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub degree: u64,
    pub children: Vec<Provenance>,
}

/// Sampler descriptor JSON: field, dimensions, declared degree and provenance.
#[derive(Clone, Debug, Serialize)]
pub struct SamplerDescriptor {
    pub schema_version: String,
    pub field: String,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub declared_degree: u64,
    pub declared_curve_degree: u64,
    pub provenance: Provenance,
}

fn extension(field: &Field, degree: usize) -> Result<Arc<Extension>> {
    Ok(Arc::new(Extension::new(field, degree)?))
}

/// `Line_{m,q}((a, b), y) = (a_1 y + b_1, .., a_m y + b_m)`.
pub fn line_sampler(field: &Field, m: usize) -> Result<SamplerSpec> {
    line_sampler_over(&extension(field, 1)?, m)
}

/// `Line_{m,Q}` over the extension field, flattened to base coordinates.
pub fn line_sampler_over(ext: &Arc<Extension>, m: usize) -> Result<SamplerSpec> {
    if m == 0 {
        return Err(Error::Param("line sampler needs m >= 1".into()));
    }
    let dd = ext.degree();
    Ok(SamplerSpec::from_node(ext.base(), 2 * m * dd, dd, m * dd, 2, Node::Line { m, ext: ext.clone() }))
}

/// `Curve_{m,t,q}((c_0, .., c_{t-1}), y) = (sum_i c_{i,j} y^i)_j`.
pub fn curve_sampler(field: &Field, m: usize, t: usize) -> Result<SamplerSpec> {
    curve_sampler_over(&extension(field, 1)?, m, t)
}

pub fn curve_sampler_over(ext: &Arc<Extension>, m: usize, t: usize) -> Result<SamplerSpec> {
    if m == 0 || t == 0 {
        return Err(Error::Param("curve sampler needs m >= 1 and t >= 1".into()));
    }
    let dd = ext.degree();
    Ok(SamplerSpec::from_node(
        ext.base(),
        t * m * dd,
        dd,
        m * dd,
        t as u64,
        Node::Curve { m, t, ext: ext.clone() },
    ))
}

/// `(S * f)(x, (y, y')) = S(f(x, y), y')`.
pub fn star(sampler: &SamplerSpec, source: &SamplerSpec) -> Result<SamplerSpec> {
    if sampler.field != source.field {
        return Err(Error::FieldMismatch);
    }
    if source.m != sampler.n {
        return Err(Error::Dimension(format!(
            "star: source outputs {} coordinates, sampler takes {} of randomness",
            source.m, sampler.n
        )));
    }
    Ok(SamplerSpec::from_node(
        &sampler.field,
        source.n,
        source.d + sampler.d,
        sampler.m,
        sampler.degree.saturating_mul(source.degree.max(1)),
        Node::Star { sampler: sampler.clone(), source: source.clone() },
    ))
}

/// `(S1 o S2)((x1, x2), y) = S1(x1, S2(x2, y))`.
pub fn circ(outer: &SamplerSpec, inner: &SamplerSpec) -> Result<SamplerSpec> {
    if outer.field != inner.field {
        return Err(Error::FieldMismatch);
    }
    if inner.m != outer.d {
        return Err(Error::Dimension(format!(
            "circ: inner sampler outputs {} coordinates, outer seed has {}",
            inner.m, outer.d
        )));
    }
    Ok(SamplerSpec::from_node(
        &outer.field,
        outer.n + inner.n,
        inner.d,
        outer.m,
        outer.degree.saturating_mul(inner.degree.max(1)),
        Node::Circ { outer: outer.clone(), inner: inner.clone() },
    ))
}

/// Keeps the first `m` output coordinates.
pub fn project(base: &SamplerSpec, m: usize) -> Result<SamplerSpec> {
    if m > base.m {
        return Err(Error::Dimension(format!("cannot project {} coordinates onto {m}", base.m)));
    }
    if m == base.m {
        return Ok(base.clone());
    }
    Ok(SamplerSpec::from_node(&base.field, base.n, base.d, m, base.degree, Node::Project { base: base.clone() }))
}

/// `(x, y) -> first m coordinates of y`, ignoring `n` randomness coordinates.
pub fn seed_projection(field: &Field, n: usize, d: usize, m: usize) -> Result<SamplerSpec> {
    if m > d {
        return Err(Error::Dimension(format!("seed projection onto {m} of {d} seed coordinates")));
    }
    Ok(SamplerSpec::from_node(field, n, d, m, 1, Node::SeedProjection))
}

/// The seedless map `x -> x`.
pub fn passthrough(field: &Field, n: usize) -> SamplerSpec {
    SamplerSpec::from_node(field, n, 0, n, 1, Node::Passthrough)
}

/// A sampler given by an explicit polynomial map over `(x, y)`.
pub fn from_polymap(map: PolyMap, n: usize) -> Result<SamplerSpec> {
    if n > map.arity() {
        return Err(Error::Dimension("randomness longer than the map's arity".into()));
    }
    let (d, m, degree) = (map.arity() - n, map.coarity(), map.degree());
    Ok(SamplerSpec::from_node(&map.field().clone(), n, d, m, degree, Node::Poly(Arc::new(map))))
}

/// `(x, y) -> base(x[perm[0]], .., x[perm[n-1]], y)`.
pub fn permute_randomness(base: &SamplerSpec, perm: &[usize]) -> Result<SamplerSpec> {
    let mut seen = vec![false; base.n];
    if perm.len() != base.n || perm.iter().any(|&i| i >= base.n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::Param("not a permutation of the randomness coordinates".into()));
    }
    Ok(SamplerSpec::from_node(
        &base.field,
        base.n,
        base.d,
        base.m,
        base.degree,
        Node::Permute { base: base.clone(), perm: perm.to_vec() },
    ))
}

/// Attaches a report label (and parameters) to a sampler without changing it.
pub fn named(base: &SamplerSpec, kind: &str, params: BTreeMap<String, Value>) -> SamplerSpec {
    SamplerSpec::from_node(
        &base.field,
        base.n,
        base.d,
        base.m,
        base.degree,
        Node::Named { kind: kind.to_string(), params, base: base.clone() },
    )
}
