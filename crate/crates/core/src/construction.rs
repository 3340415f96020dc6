//! Parameter derivation and assembly of the outer sampler, the inner
//! sampler and their composition.
//!
//! Every build goes through a dimensions-only [`PlanNode`] tree first. Plans
//! never construct fields, so ledgers can be checked for parameters whose
//! extension fields are far too large to build; [`ledger_violations`]
//! recomputes the wiring of a plan independently of how it was assembled.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extractor::{blkcnvt, blkext, rscon_over};
use crate::gf::{Extension, Field, DEFAULT_FIELD_BITS};
use crate::ratio::{ceil_log, check_unit_open};
use crate::samplers::{
    circ, curve_sampler_over, line_sampler_over, named, project, seed_projection, star, Provenance, SamplerSpec,
    SCHEMA_VERSION,
};

fn big_str<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ratio_str<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OuterParams {
    pub q: u64,
    pub m: u64,
    /// `2^ceil(log2 m)`; the sampler is built for `m_prime` and projected.
    pub m_prime: u64,
    pub s: u32,
    pub d: u64,
    pub n: u64,
    #[serde(serialize_with = "ratio_str")]
    pub delta: BigRational,
    /// `ceil(log_q(2/delta))`
    pub log_term: u64,
    /// `d_1, .., d_s` with `d_i = 2^(s-i)`
    pub d_i: Vec<u64>,
    /// converter block sizes `4 d_i`
    pub blocks: Vec<u64>,
}

impl OuterParams {
    /// `n * 2^s`
    pub fn degree_bound(&self) -> BigUint {
        BigUint::from(self.n) << self.s
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InnerParams {
    pub q: u64,
    pub m: u64,
    pub s: u32,
    #[serde(serialize_with = "ratio_str")]
    pub delta: BigRational,
    /// `ceil(log_q(1/delta))`
    pub log_term: u64,
    /// `d_0, .., d_s`
    pub d: Vec<u64>,
    /// `n_0, .., n_s`
    pub n: Vec<u64>,
}

impl InnerParams {
    /// Randomness of the final level, `n_s d_s`.
    pub fn randomness(&self) -> u64 {
        self.n[self.s as usize] * self.d[self.s as usize]
    }

    /// `prod_{j=1..i} (n_j/4)^2`
    pub fn degree_bound(&self, i: usize) -> BigUint {
        (1..=i).fold(BigUint::one(), |acc, j| {
            let t = BigUint::from(self.n[j] / 4);
            acc * &t * &t
        })
    }
}

fn ceil_log2(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

fn check_q(q: u64) -> Result<()> {
    crate::gf::prime_power(q).map(|_| ())
}

pub fn outer_params(q: u64, m: u64, delta: &BigRational) -> Result<OuterParams> {
    check_q(q)?;
    check_unit_open("delta", delta)?;
    if m == 0 {
        return Err(Error::Param("m must be at least 1".into()));
    }
    let s = ceil_log2(m);
    let m_prime = 1u64 << s;
    let log_term = ceil_log(q, &(BigRational::from_integer(2.into()) / delta));
    let n = 4 * m_prime + log_term;
    let d_i: Vec<u64> = (1..=s).map(|i| 1u64 << (s - i)).collect();
    let blocks = d_i.iter().map(|d| 4 * d).collect();
    Ok(OuterParams { q, m, m_prime, s, d: s as u64 + 1, n, delta: delta.clone(), log_term, d_i, blocks })
}

pub fn inner_params(q: u64, m: u64, delta: &BigRational) -> Result<InnerParams> {
    check_q(q)?;
    check_unit_open("delta", delta)?;
    if m == 0 {
        return Err(Error::Param("m must be at least 1".into()));
    }
    let s = ceil_log2(m);
    let log_term = ceil_log(q, &(BigRational::one() / delta));
    let d = (0..=s).map(|i| 1u64 << (s - i)).collect();
    let too_large = || Error::Param(format!("inner sampler for m = {m} is too large to describe"));
    let mut n = Vec::with_capacity(s as usize + 1);
    for i in 0..=s {
        let base = 16u64.checked_pow(i).ok_or_else(too_large)?;
        n.push(if i == s { base.checked_add(20 * log_term).ok_or_else(too_large)? } else { base });
    }
    Ok(InnerParams { q, m, s, delta: delta.clone(), log_term, d, n })
}

/// Dimensions declared for a labelled node by the parameter formulas.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Declared {
    pub n: u64,
    pub d: u64,
    pub m: u64,
    #[serde(serialize_with = "big_str")]
    pub degree_bound: BigUint,
}

/// A construction tree with dimensions and declared degrees only.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PlanNode {
    pub kind: String,
    pub params: BTreeMap<String, Value>,
    pub n: u64,
    pub d: u64,
    pub m: u64,
    #[serde(serialize_with = "big_str")]
    pub degree: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<Declared>,
    pub children: Vec<PlanNode>,
}

fn leaf(kind: &str, params: Value, n: u64, d: u64, m: u64, degree: u64) -> PlanNode {
    let params = match params {
        Value::Object(o) => o.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    PlanNode { kind: kind.into(), params, n, d, m, degree: degree.into(), declared: None, children: vec![] }
}

fn p_line(m: u64, dd: u64) -> PlanNode {
    leaf("line", json!({"m": m, "field_degree": dd}), 2 * m * dd, dd, m * dd, 2)
}

fn p_curve(m: u64, t: u64, dd: u64) -> PlanNode {
    leaf("curve", json!({"m": m, "t": t, "field_degree": dd}), t * m * dd, dd, m * dd, t)
}

fn p_rscon(n: u64, m: u64, dd: u64) -> PlanNode {
    leaf("rscon", json!({"n": n, "m": m, "field_degree": dd}), n * dd, dd, m * dd, n)
}

fn p_blkcnvt(n: u64, blocks: &[u64]) -> PlanNode {
    leaf("blkcnvt", json!({"n": n, "blocks": blocks}), n, blocks.len() as u64, blocks.iter().sum(), n)
}

fn p_blkext(parts: Vec<PlanNode>) -> PlanNode {
    let mut prev_d = 0;
    let mut m = 0;
    for p in &parts {
        m += p.m.saturating_sub(prev_d);
        prev_d = p.d;
    }
    let degree = parts.iter().fold(BigUint::one(), |a, p| a * &p.degree);
    PlanNode {
        kind: "blkext".into(),
        params: BTreeMap::new(),
        n: parts.iter().map(|p| p.n).sum(),
        d: prev_d,
        m,
        degree,
        declared: None,
        children: parts,
    }
}

fn p_star(sampler: PlanNode, source: PlanNode) -> PlanNode {
    PlanNode {
        kind: "star".into(),
        params: BTreeMap::new(),
        n: source.n,
        d: source.d + sampler.d,
        m: sampler.m,
        degree: &sampler.degree * &source.degree,
        declared: None,
        children: vec![sampler, source],
    }
}

fn p_circ(outer: PlanNode, inner: PlanNode) -> PlanNode {
    PlanNode {
        kind: "circ".into(),
        params: BTreeMap::new(),
        n: outer.n + inner.n,
        d: inner.d,
        m: outer.m,
        degree: &outer.degree * &inner.degree,
        declared: None,
        children: vec![outer, inner],
    }
}

fn p_project(base: PlanNode, m: u64) -> PlanNode {
    if m == base.m {
        return base;
    }
    PlanNode {
        kind: "project".into(),
        params: [("m".to_string(), m.into())].into(),
        n: base.n,
        d: base.d,
        m,
        degree: base.degree.clone(),
        declared: None,
        children: vec![base],
    }
}

fn p_named(base: PlanNode, kind: &str, params: Value, declared: Declared) -> PlanNode {
    let params = match params {
        Value::Object(o) => o.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    PlanNode {
        kind: kind.into(),
        params,
        n: base.n,
        d: base.d,
        m: base.m,
        degree: base.degree.clone(),
        declared: Some(declared),
        children: vec![base],
    }
}

fn outer_label(p: &OuterParams) -> Value {
    json!({"q": p.q, "m": p.m, "m_prime": p.m_prime, "s": p.s, "n": p.n, "delta": p.delta.to_string()})
}

fn inner_level_label(p: &InnerParams, i: usize) -> Value {
    json!({"i": i, "n_i": p.n[i], "d_i": p.d[i]})
}

fn inner_label(p: &InnerParams) -> Value {
    json!({"q": p.q, "m": p.m, "s": p.s, "delta": p.delta.to_string(), "n": p.n, "d": p.d})
}

pub fn plan_outer(p: &OuterParams) -> PlanNode {
    let core = if p.s == 0 {
        leaf("seed_projection", json!({}), p.n, 1, 1, 1)
    } else {
        let lines = p.d_i.iter().map(|&d| p_line(2, d)).collect();
        p_star(p_blkext(lines), p_blkcnvt(p.n, &p.blocks))
    };
    let declared = Declared { n: p.n, d: p.d, m: p.m, degree_bound: p.degree_bound() };
    p_named(p_project(core, p.m), "outer_samp", outer_label(p), declared)
}

pub fn plan_inner(p: &InnerParams) -> PlanNode {
    let s = p.s as usize;
    let mut cur = leaf("seed_projection", json!({}), p.n[0] * p.d[0], p.d[0], p.m, 1);
    for i in 1..=s {
        let t = p.n[i] / 4;
        let rs = p_rscon(t, 2 * p.n[i - 1], p.d[i]);
        let level = p_circ(p_star(cur, rs), p_curve(3, t, p.d[i]));
        let declared = Declared { n: p.n[i] * p.d[i], d: p.d[i], m: p.m, degree_bound: p.degree_bound(i) };
        cur = p_named(level, "inner_level", inner_level_label(p, i), declared);
    }
    let declared = Declared { n: p.randomness(), d: 1, m: p.m, degree_bound: p.degree_bound(s) };
    p_named(cur, "inner_samp", inner_label(p), declared)
}

/// Outer and inner parameters of the composed sampler, each at `delta/2`.
pub fn samp_params(q: u64, m: u64, delta: &BigRational) -> Result<(OuterParams, InnerParams)> {
    check_unit_open("delta", delta)?;
    let half = delta / BigRational::from_integer(2.into());
    let outer = outer_params(q, m, &half)?;
    let inner = inner_params(q, outer.d, &half)?;
    Ok((outer, inner))
}

pub fn plan_samp(q: u64, m: u64, delta: &BigRational) -> Result<PlanNode> {
    let (op, ip) = samp_params(q, m, delta)?;
    let outer = plan_outer(&op);
    let inner = plan_inner(&ip);
    let declared = Declared {
        n: op.n + ip.randomness(),
        d: 1,
        m,
        degree_bound: op.degree_bound() * ip.degree_bound(ip.s as usize),
    };
    let label = json!({"q": q, "m": m, "delta": delta.to_string()});
    Ok(p_named(p_circ(outer, inner), "samp", label, declared))
}

fn param_u64(node: &PlanNode, key: &str) -> Option<u64> {
    node.params.get(key).and_then(Value::as_u64)
}

/// Recomputes every wiring and dimension rule of the plan bottom-up and
/// lists each mismatch. An empty result means all ledgers balance.
pub fn ledger_violations(plan: &PlanNode) -> Vec<String> {
    let mut out = Vec::new();
    check_node(plan, "root", &mut out);
    out
}

fn check_node(node: &PlanNode, path: &str, out: &mut Vec<String>) {
    let here = format!("{path}/{}", node.kind);
    for (i, c) in node.children.iter().enumerate() {
        check_node(c, &format!("{here}[{i}]"), out);
    }
    let mut fail = |msg: String| out.push(format!("{here}: {msg}"));
    let ch = &node.children;
    let want: Option<(u64, u64, u64)> = match node.kind.as_str() {
        "line" | "curve" | "rscon" => {
            let dd = param_u64(node, "field_degree").unwrap_or(0);
            let m = param_u64(node, "m").unwrap_or(0);
            if dd == 0 || m == 0 {
                fail("missing or zero parameters".into());
            }
            match node.kind.as_str() {
                "line" => Some((2 * m * dd, dd, m * dd)),
                "curve" => Some((param_u64(node, "t").unwrap_or(0) * m * dd, dd, m * dd)),
                _ => Some((param_u64(node, "n").unwrap_or(0) * dd, dd, m * dd)),
            }
        }
        "blkcnvt" => {
            let blocks: Vec<u64> = node
                .params
                .get("blocks")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(Value::as_u64).collect())
                .unwrap_or_default();
            if blocks.is_empty() || blocks.contains(&0) {
                fail(format!("bad block sizes {blocks:?}"));
            }
            // block i occupies [sum_{j<i} m_j, sum_{j<=i} m_j) and takes seed coordinate i
            let mut off = 0;
            for b in &blocks {
                off += b;
            }
            Some((param_u64(node, "n").unwrap_or(0), blocks.len() as u64, off))
        }
        "blkext" => {
            let mut prev_d = 0;
            let mut m = 0;
            for (i, p) in ch.iter().enumerate() {
                if p.m < prev_d {
                    fail(format!("extractor {} outputs {} < seed {prev_d} of extractor {i}", i + 1, p.m));
                }
                m += p.m.saturating_sub(prev_d);
                prev_d = p.d;
            }
            Some((ch.iter().map(|p| p.n).sum(), prev_d, m))
        }
        "star" => {
            let (s, f) = (&ch[0], &ch[1]);
            if f.m != s.n {
                fail(format!("source outputs {} but sampler randomness is {}", f.m, s.n));
            }
            Some((f.n, f.d + s.d, s.m))
        }
        "circ" => {
            let (o, i) = (&ch[0], &ch[1]);
            if i.m != o.d {
                fail(format!("inner outputs {} but outer seed is {}", i.m, o.d));
            }
            Some((o.n + i.n, i.d, o.m))
        }
        "project" => {
            let m = param_u64(node, "m").unwrap_or(0);
            if m > ch[0].m {
                fail(format!("projection onto {m} of {} coordinates", ch[0].m));
            }
            Some((ch[0].n, ch[0].d, m))
        }
        "seed_projection" => {
            if node.m > node.d {
                fail(format!("seed projection onto {} of {} seed coordinates", node.m, node.d));
            }
            None
        }
        _ => {
            if let Some(c) = ch.first() {
                Some((c.n, c.d, c.m))
            } else {
                fail("unknown leaf".into());
                None
            }
        }
    };
    if let Some((n, d, m)) = want {
        if (node.n, node.d, node.m) != (n, d, m) {
            fail(format!("dimensions ({}, {}, {}) but wiring gives ({n}, {d}, {m})", node.n, node.d, node.m));
        }
    }
    if let Some(decl) = &node.declared {
        if (node.n, node.d, node.m) != (decl.n, decl.d, decl.m) {
            fail(format!(
                "composed dimensions ({}, {}, {}) differ from declared ({}, {}, {})",
                node.n, node.d, node.m, decl.n, decl.d, decl.m
            ));
        }
        if node.degree > decl.degree_bound {
            fail(format!("degree {} exceeds the bound {}", node.degree, decl.degree_bound));
        }
    }
    match node.kind.as_str() {
        "outer_samp" => {
            let s = param_u64(node, "s").unwrap_or(0);
            let mp = param_u64(node, "m_prime").unwrap_or(0);
            if mp != 1 << s || mp < node.m {
                fail(format!("m' = {mp} is not 2^s = {} covering m = {}", 1u64 << s, node.m));
            }
        }
        "inner_level" => {
            let n_i = param_u64(node, "n_i").unwrap_or(0);
            if n_i % 4 != 0 {
                fail(format!("n_i = {n_i} is not divisible by 4"));
            }
        }
        "inner_samp" => {
            let s = param_u64(node, "s").unwrap_or(0);
            if node.m > 1 << s {
                fail(format!("m = {} exceeds 2^s = {}", node.m, 1u64 << s));
            }
        }
        _ => {}
    }
}

/// Reasons a plan cannot be built as is: extension fields above the size
/// limit and condensers whose evaluation points would repeat.
pub fn build_issues(plan: &PlanNode, q: u64, limit_bits: u32) -> Vec<String> {
    let mut out = Vec::new();
    collect_issues(plan, q, limit_bits, &mut out);
    out.sort();
    out.dedup();
    out
}

fn field_size(q: u64, dd: u64) -> BigUint {
    BigUint::from(q).pow(dd as u32)
}

fn collect_issues(node: &PlanNode, q: u64, limit_bits: u32, out: &mut Vec<String>) {
    for c in &node.children {
        collect_issues(c, q, limit_bits, out);
    }
    let dd = match param_u64(node, "field_degree") {
        Some(dd) => dd,
        None if node.kind == "blkcnvt" => 1,
        None => return,
    };
    let size = field_size(q, dd);
    if size > BigUint::one() << limit_bits {
        out.push(format!("F_{q}^{dd} exceeds the field limit 2^{limit_bits}"));
        return;
    }
    let points_needed = match node.kind.as_str() {
        "rscon" => param_u64(node, "m").map(|m| vec![m]),
        "blkcnvt" => node.params.get("blocks").and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_u64).collect()),
        _ => None,
    };
    for m in points_needed.unwrap_or_default() {
        if BigUint::from(m) > size {
            out.push(format!(
                "rscon with m = {m} over F_{q}^{dd} needs {} distinct nonzero points, the field has {}",
                m - 1,
                &size - 1u32
            ));
        }
    }
}

/// Small-field notes: polynomials whose degree reaches the field size.
pub fn warnings(plan: &PlanNode, q: u64) -> Vec<String> {
    let mut out = vec![
        "guarantees hold for sufficiently large q with uncertified constants; measured values are reported, not asserted"
            .to_string(),
    ];
    collect_warnings(plan, q, &mut out);
    out.sort();
    out.dedup();
    out
}

fn collect_warnings(node: &PlanNode, q: u64, out: &mut Vec<String>) {
    for c in &node.children {
        collect_warnings(c, q, out);
    }
    let (Some(dd), Some(t)) = (
        param_u64(node, "field_degree"),
        match node.kind.as_str() {
            "curve" => param_u64(node, "t"),
            "rscon" => param_u64(node, "n"),
            _ => None,
        },
    ) else {
        return;
    };
    if BigUint::from(t) >= field_size(q, dd) {
        out.push(format!(
            "{} of degree {t} over F_{q}^{dd}: degree reaches the field size, below any useful threshold",
            node.kind
        ));
    }
}

/// Everything `params` reports: parameter ledgers, plan, issues.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub schema_version: String,
    pub q: u64,
    pub m: u64,
    #[serde(serialize_with = "ratio_str")]
    pub delta: BigRational,
    pub outer: OuterParams,
    pub inner: InnerParams,
    pub n_outer: u64,
    pub n_inner: u64,
    pub n: u64,
    pub seed_length: u64,
    pub output_length: u64,
    #[serde(serialize_with = "big_str")]
    pub outer_degree_bound: BigUint,
    #[serde(serialize_with = "big_str")]
    pub inner_degree_bound: BigUint,
    #[serde(serialize_with = "big_str")]
    pub degree_bound: BigUint,
    pub ledger_ok: bool,
    pub ledger_violations: Vec<String>,
    pub buildable: bool,
    pub build_issues: Vec<String>,
    pub warnings: Vec<String>,
    pub plan: PlanNode,
}

pub fn construction_report(q: u64, m: u64, delta: &BigRational) -> Result<ConstructionReport> {
    let (outer, inner) = samp_params(q, m, delta)?;
    let plan = plan_samp(q, m, delta)?;
    let ledger = ledger_violations(&plan);
    let issues = build_issues(&plan, q, DEFAULT_FIELD_BITS);
    let n_inner = inner.randomness();
    Ok(ConstructionReport {
        schema_version: SCHEMA_VERSION.into(),
        q,
        m,
        delta: delta.clone(),
        n_outer: outer.n,
        n_inner,
        n: outer.n + n_inner,
        seed_length: plan.d,
        output_length: plan.m,
        outer_degree_bound: outer.degree_bound(),
        inner_degree_bound: inner.degree_bound(inner.s as usize),
        degree_bound: outer.degree_bound() * inner.degree_bound(inner.s as usize),
        ledger_ok: ledger.is_empty(),
        ledger_violations: ledger,
        buildable: issues.is_empty(),
        build_issues: issues,
        warnings: warnings(&plan, q),
        outer,
        inner,
        plan,
    })
}

/// True when the built tree has the plan's shape and dimensions node by node.
pub fn matches_plan(plan: &PlanNode, prov: &Provenance) -> bool {
    plan.kind == prov.kind
        && (plan.n, plan.d, plan.m) == (prov.n as u64, prov.d as u64, prov.m as u64)
        && plan.children.len() == prov.children.len()
        && plan.children.iter().zip(&prov.children).all(|(a, b)| matches_plan(a, b))
}

struct Builder {
    field: Field,
    exts: HashMap<u64, Arc<Extension>>,
}

impl Builder {
    fn new(field: &Field) -> Builder {
        Builder { field: field.clone(), exts: HashMap::new() }
    }

    fn ext(&mut self, dd: u64) -> Result<Arc<Extension>> {
        if let Some(e) = self.exts.get(&dd) {
            return Ok(e.clone());
        }
        let e = Arc::new(Extension::new(&self.field, dd as usize)?);
        self.exts.insert(dd, e.clone());
        Ok(e)
    }

    fn outer(&mut self, p: &OuterParams) -> Result<SamplerSpec> {
        let f = self.field.clone();
        let core = if p.s == 0 {
            seed_projection(&f, p.n as usize, 1, 1)?
        } else {
            let lines = p
                .d_i
                .iter()
                .map(|&d| line_sampler_over(&self.ext(d)?, 2))
                .collect::<Result<Vec<_>>>()?;
            let blocks: Vec<usize> = p.blocks.iter().map(|&b| b as usize).collect();
            star(&blkext(&lines)?, &blkcnvt(&f, p.n as usize, &blocks)?)?
        };
        let s = project(&core, p.m as usize)?;
        Ok(named(&s, "outer_samp", value_map(outer_label(p))))
    }

    fn inner(&mut self, p: &InnerParams) -> Result<SamplerSpec> {
        let f = self.field.clone();
        let (n, d) = (&p.n, &p.d);
        let mut cur = seed_projection(&f, (n[0] * d[0]) as usize, d[0] as usize, p.m as usize)?;
        for i in 1..=p.s as usize {
            let ext = self.ext(d[i])?;
            let t = (n[i] / 4) as usize;
            let rs = rscon_over(&ext, t, 2 * n[i - 1] as usize)?;
            let curve = curve_sampler_over(&ext, 3, t)?;
            let level = circ(&star(&cur, &rs)?, &curve)?;
            cur = named(&level, "inner_level", value_map(inner_level_label(p, i)));
        }
        Ok(named(&cur, "inner_samp", value_map(inner_label(p))))
    }
}

fn value_map(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(o) => o.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

/// Checks the plan, builds, and confirms the result has the plan's shape.
fn build_planned(
    field: &Field,
    plan: &PlanNode,
    build: impl FnOnce(&mut Builder) -> Result<SamplerSpec>,
) -> Result<SamplerSpec> {
    let issues = build_issues(plan, field.q(), DEFAULT_FIELD_BITS);
    if !issues.is_empty() {
        return Err(Error::Param(format!("cannot build with these parameters: {}", issues.join("; "))));
    }
    let violations = ledger_violations(plan);
    if !violations.is_empty() {
        return Err(Error::Internal(format!("ledger violations: {}", violations.join("; "))));
    }
    let s = build(&mut Builder::new(field))?;
    if !matches_plan(plan, &s.provenance()) {
        return Err(Error::Internal("built sampler does not match its plan".into()));
    }
    Ok(s)
}

pub fn build_outer(field: &Field, m: u64, delta: &BigRational) -> Result<SamplerSpec> {
    let p = outer_params(field.q(), m, delta)?;
    build_planned(field, &plan_outer(&p), |b| b.outer(&p))
}

pub fn build_inner(field: &Field, m: u64, delta: &BigRational) -> Result<SamplerSpec> {
    let p = inner_params(field.q(), m, delta)?;
    build_planned(field, &plan_inner(&p), |b| b.inner(&p))
}

/// `Samp_{m,delta,q} = Outer_{m,delta/2} o Inner_{d,delta/2}`.
pub fn build_samp(field: &Field, m: u64, delta: &BigRational) -> Result<SamplerSpec> {
    let (op, ip) = samp_params(field.q(), m, delta)?;
    let plan = plan_samp(field.q(), m, delta)?;
    build_planned(field, &plan, |b| {
        let outer = b.outer(&op)?;
        let inner = b.inner(&ip)?;
        let label = json!({"q": field.q(), "m": m, "delta": delta.to_string()});
        Ok(named(&circ(&outer, &inner)?, "samp", value_map(label)))
    })
}

/// Approximate float value of a degree bound for display.
pub fn bound_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Elem;
    use crate::ratio::parse_ratio;
    use crate::space;

    fn r(s: &str, q: u64) -> BigRational {
        parse_ratio(s, Some(q)).unwrap()
    }

    #[test]
    fn outer_example() {
        let p = outer_params(16, 4, &r("1/256", 16)).unwrap();
        assert_eq!((p.s, p.d, p.n, p.log_term), (2, 3, 19, 3));
        assert_eq!(p.d_i, vec![2, 1]);
        assert_eq!(p.blocks, vec![8, 4]);
        assert_eq!(p.degree_bound(), BigUint::from(76u32));
        let p3 = outer_params(16, 3, &r("1/256", 16)).unwrap();
        assert_eq!((p3.m, p3.m_prime, p3.n), (3, 4, 19));
        let p1 = outer_params(16, 1, &r("1/256", 16)).unwrap();
        assert_eq!((p1.s, p1.d, p1.n), (0, 1, 7));
        assert!(outer_params(16, 4, &r("1", 16)).is_err());
        assert!(outer_params(16, 0, &r("1/2", 16)).is_err());
        assert!(outer_params(12, 4, &r("1/2", 16)).is_err());
    }

    #[test]
    fn inner_example() {
        let p = inner_params(16, 4, &r("q^-4", 16)).unwrap();
        assert_eq!(p.s, 2);
        assert_eq!(p.d, vec![4, 2, 1]);
        assert_eq!(p.n, vec![1, 16, 336]);
        // 2 n_0 d_1 = n_0 d_0
        assert_eq!(2 * p.n[0] * p.d[1], p.n[0] * p.d[0]);
        assert_eq!(p.n[1] % 4, 0);
        assert_eq!(p.degree_bound(2), BigUint::from(16u32 * 84 * 84));
    }

    #[test]
    fn plans_balance() {
        for q in [16u64, 64, 256] {
            for m in 1..=64 {
                for k in 1..=8 {
                    let delta = r(&format!("q^-{k}"), q);
                    let plan = plan_samp(q, m, &delta).unwrap();
                    assert_eq!(ledger_violations(&plan), Vec::<String>::new(), "q={q} m={m} k={k}");
                    assert_eq!((plan.d, plan.m), (1, m));
                }
            }
        }
    }

    #[test]
    fn ledger_check_catches_miswiring() {
        let p = outer_params(16, 4, &r("1/256", 16)).unwrap();
        let mut plan = plan_outer(&p);
        assert!(ledger_violations(&plan).is_empty());
        plan.children[0].children[1].m += 1;
        assert!(!ledger_violations(&plan).is_empty());

        let ip = inner_params(16, 4, &r("1/256", 16)).unwrap();
        let mut plan = plan_inner(&ip);
        plan.declared.as_mut().unwrap().n += 1;
        assert_eq!(ledger_violations(&plan).len(), 1);
    }

    #[test]
    fn issues_flag_wrapping_condensers() {
        // inner m = 3 at q = 16: the last level needs 2 n_1 = 32 points in F_16
        let ip = inner_params(16, 3, &r("1/256", 16)).unwrap();
        let issues = build_issues(&plan_inner(&ip), 16, DEFAULT_FIELD_BITS);
        assert_eq!(issues.len(), 1, "{issues:?}");
        let f = Field::new(2, 4).unwrap();
        assert!(matches!(build_inner(&f, 3, &r("1/256", 16)), Err(Error::Param(_))));
        // m = 64 at q = 256 needs F_256^32
        let plan = plan_samp(256, 64, &r("q^-2", 256)).unwrap();
        assert!(build_issues(&plan, 256, DEFAULT_FIELD_BITS).iter().any(|s| s.contains("field limit")));
    }

    #[test]
    fn outer_matches_hand_threading() {
        // m = 2, q = 4, delta = 1/4: n = 8 + ceil(log_4 8) = 10, s = 1, one block of 4
        let f = Field::new(2, 2).unwrap();
        let s = build_outer(&f, 2, &r("1/4", 4)).unwrap();
        assert_eq!((s.n(), s.d(), s.m()), (10, 2, 2));
        let line = crate::samplers::line_sampler(&f, 2).unwrap();
        let rs = crate::extractor::rscon(&f, 10, 4).unwrap();
        let mut state = 12345u64;
        for _ in 0..20 {
            let x: Vec<Elem> = (0..10)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    Elem((state >> 33) % 4)
                })
                .collect();
            for yi in 0..16 {
                let y = space::point(4, yi, 2);
                let block = rs.eval(&x, &y[..1]).unwrap();
                let want = line.eval(&block, &y[1..]).unwrap();
                assert_eq!(s.eval(&x, &y).unwrap(), want);
            }
        }
    }

    #[test]
    fn built_samplers_match_plans() {
        let f = Field::new(2, 4).unwrap();
        for m in 1..=8 {
            let o = build_outer(&f, m, &r("1/256", 16)).unwrap();
            assert_eq!((o.n() as u64, o.d() as u64, o.m() as u64), {
                let p = outer_params(16, m, &r("1/256", 16)).unwrap();
                (p.n, p.d, m)
            });
        }
        for m in 1..=2 {
            let i = build_inner(&f, m, &r("1/16", 16)).unwrap();
            assert_eq!((i.d(), i.m()), (1, m as usize));
        }
        let f = Field::new(2, 8).unwrap();
        let s = build_samp(&f, 4, &r("2^-16", 256)).unwrap();
        assert_eq!((s.n(), s.d(), s.m()), (19 + 316, 1, 4));
    }

    #[test]
    fn report_serializes() {
        let rep = construction_report(16, 4, &r("2^-8", 16)).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["outer"]["n"], 19);
        assert_eq!(v["outer"]["d"], 3);
        assert_eq!(v["schema_version"], "1");
        assert!(v["ledger_ok"].as_bool().unwrap());
        assert!(v["degree_bound"].is_string());
    }
}
