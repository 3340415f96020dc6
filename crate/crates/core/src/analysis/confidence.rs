//! Confidence error of a sampler against subset families, exactly or by
//! Monte Carlo, plus t-wise independence and list recovery by enumeration.

use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::bounds::{bound_calculator, Applicability, Bound, BoundQuery};
use super::family::Family;
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::ratio::to_f64;
use crate::samplers::{SamplerSpec, SCHEMA_VERSION};
use crate::space;

/// Default cap on enumerated states (randomness values, seeds, joint outputs).
pub const DEFAULT_CAP_STATES: u64 = 1 << 24;

/// JSON schema every serialized [`EvalReport`] satisfies.
pub const EVAL_REPORT_SCHEMA: &str = include_str!("../../schema/eval_report.schema.json");

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.5758293035489004;

const EXACT_CHUNK: u64 = 1 << 12;
const MC_CHUNK: u64 = 1 << 10;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc { trials: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub epsilon: BigRational,
    pub mode: Mode,
    pub cap_states: u64,
    /// The confidence error the sampler was built for, if any.
    pub target_delta: Option<BigRational>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SamplerSummary {
    pub kind: String,
    pub field: String,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub declared_degree: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubsetSummary {
    pub family: String,
    pub id: String,
    pub params: Value,
    pub size: String,
    pub density: String,
    pub density_f64: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Interval {
    pub method: String,
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub schema_version: String,
    pub sampler: SamplerSummary,
    pub subset: SubsetSummary,
    pub epsilon: String,
    pub mode: String,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub sample_size: u64,
    pub failures: u64,
    /// `failures / trials`; in exact mode `trials = q^n`.
    pub delta_hat: String,
    pub delta_hat_f64: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_delta: Option<Bound>,
    pub predicted: Vec<Bound>,
}

impl EvalReport {
    pub fn delta_hat(&self) -> BigRational {
        BigRational::new(self.failures.into(), self.trials.max(1).into())
    }
}

/// Per-thread hit counters for all members of all families.
struct Tally<'a> {
    families: &'a [Family],
    offsets: Vec<usize>,
    lo: &'a [i64],
    hi: &'a [i64],
    always: &'a [u32],
    counts: Vec<i64>,
    mark: Vec<u64>,
    epoch: u64,
    touched: Vec<u32>,
    fails: Vec<u64>,
    buf: Vec<u32>,
    pt: Vec<Elem>,
}

impl<'a> Tally<'a> {
    fn new(families: &'a [Family], offsets: &[usize], lo: &'a [i64], hi: &'a [i64], always: &'a [u32], m: usize) -> Self {
        let total = lo.len();
        Tally {
            families,
            offsets: offsets.to_vec(),
            lo,
            hi,
            always,
            counts: vec![0; total],
            mark: vec![0; total],
            epoch: 0,
            touched: Vec::new(),
            fails: vec![0; total],
            buf: Vec::new(),
            pt: vec![Elem::ZERO; m],
        }
    }

    fn run(&mut self, s: &SamplerSpec, x: &[Elem], seeds: &[Elem], d: usize) {
        let b = s.bind(x);
        for y in seeds.chunks_exact(d.max(1)).take(if d == 0 { 1 } else { usize::MAX }) {
            let y = if d == 0 { &[][..] } else { y };
            b.eval_into(y, &mut self.pt);
            for (f, &off) in self.families.iter().zip(&self.offsets) {
                self.buf.clear();
                f.incidences(&self.pt, &mut self.buf);
                for &j in &self.buf {
                    let g = off + j as usize;
                    if self.counts[g] == 0 {
                        self.touched.push(g as u32);
                    }
                    self.counts[g] += 1;
                }
            }
        }
        self.epoch += 1;
        for &g in &self.touched {
            let g = g as usize;
            self.mark[g] = self.epoch;
            if self.counts[g] < self.lo[g] || self.counts[g] > self.hi[g] {
                self.fails[g] += 1;
            }
        }
        for &g in self.always {
            let g = g as usize;
            if self.mark[g] != self.epoch && self.lo[g] > 0 {
                self.fails[g] += 1;
            }
        }
        for &g in &self.touched {
            self.counts[g as usize] = 0;
        }
        self.touched.clear();
    }
}

fn floor_i64(v: &BigRational) -> i64 {
    v.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

fn ceil_i64(v: &BigRational) -> i64 {
    v.ceil().to_integer().to_i64().unwrap_or(i64::MIN)
}

fn all_seeds(q: u64, d: usize, cap: u64) -> Result<Vec<Elem>> {
    let count = space::checked_count(q, d, cap)?;
    let mut out = vec![Elem::ZERO; count as usize * d];
    for (i, chunk) in out.chunks_exact_mut(d.max(1)).enumerate().take(if d == 0 { 0 } else { usize::MAX }) {
        space::decode_point(q, i as u64, chunk);
    }
    Ok(out)
}

fn summary(s: &SamplerSpec) -> SamplerSummary {
    let kind = match s.label() {
        Some((k, _)) => k.to_string(),
        None => s.provenance().kind,
    };
    SamplerSummary {
        kind,
        field: s.field().spec().to_text(),
        n: s.n(),
        d: s.d(),
        m: s.m(),
        declared_degree: s.degree(),
    }
}

fn predicted(s: &SamplerSpec, mu: &BigRational, samples: u64, eps: &BigRational) -> Vec<Bound> {
    let mut out = Vec::new();
    if let Some((kind, _, t, q)) = s.basic_shape() {
        if q == s.field().q() {
            let eps_s = eps.to_string();
            if kind == "line" {
                out.extend(bound_calculator(&BoundQuery::Line { q, epsilon: eps_s.clone() }).ok());
            }
            if t >= 2 {
                let pw = BoundQuery::Pairwise { mu: mu.to_string(), samples, epsilon: eps_s.clone() };
                out.extend(bound_calculator(&pw).ok());
                let tw = BoundQuery::Twise { t: t as u32, mu: mu.to_string(), samples, epsilon: eps_s };
                out.extend(bound_calculator(&tw).ok());
            }
            if kind == "curve" && t >= 4 {
                out.extend(bound_calculator(&BoundQuery::Curve { q, t: t as u32 }).ok());
            }
        }
    }
    out
}

/// Estimates `Pr_x[|μ_{S(x)}(A) - μ(A)| > ε]` for every member of every family.
pub fn confidence_error(s: &SamplerSpec, families: &[Family], opts: &EvalOptions) -> Result<Vec<EvalReport>> {
    if !opts.epsilon.is_positive_rational() {
        return Err(Error::Param("epsilon must be positive".into()));
    }
    if let Some(f) = families.iter().find(|f| f.m() != s.m()) {
        return Err(Error::Dimension(format!(
            "{} family over {} coordinates for a sampler with m = {}",
            f.name(),
            f.m(),
            s.m()
        )));
    }
    let q = s.field().q();
    let (n, d) = (s.n(), s.d());
    let seeds = all_seeds(q, d, opts.cap_states)?;
    let samples = space::point_count(q, d).unwrap_or(u64::MAX);
    let big_n = BigRational::from_integer(samples.into());

    let mut offsets = Vec::new();
    let mut mus = Vec::new();
    for f in families {
        offsets.push(mus.len());
        mus.extend((0..f.members().len()).map(|i| f.density(i)));
    }
    let lo: Vec<i64> = mus.iter().map(|mu| ceil_i64(&(&big_n * (mu - &opts.epsilon)))).collect();
    let hi: Vec<i64> = mus.iter().map(|mu| floor_i64(&(&big_n * (mu + &opts.epsilon)))).collect();
    let always: Vec<u32> = (0..lo.len()).filter(|&g| lo[g] > 0).map(|g| g as u32).collect();
    let m = s.m();
    let new_tally = || Tally::new(families, &offsets, &lo, &hi, &always, m);

    let (trials, fails) = match &opts.mode {
        Mode::Exact => {
            let total = space::checked_count(q, n, opts.cap_states)?;
            let chunks = total.div_ceil(EXACT_CHUNK);
            let fails = (0..chunks)
                .into_par_iter()
                .map_init(new_tally, |t, c| {
                    t.fails.iter_mut().for_each(|v| *v = 0);
                    let mut x = vec![Elem::ZERO; n];
                    for idx in c * EXACT_CHUNK..((c + 1) * EXACT_CHUNK).min(total) {
                        space::decode_point(q, idx, &mut x);
                        t.run(s, &x, &seeds, d);
                    }
                    t.fails.clone()
                })
                .reduce(|| vec![0; lo.len()], add_vecs);
            (total, fails)
        }
        Mode::Mc { trials, seed } => {
            if *trials == 0 {
                return Err(Error::Param("Monte Carlo needs at least one trial".into()));
            }
            let chunks = trials.div_ceil(MC_CHUNK);
            let fails = (0..chunks)
                .into_par_iter()
                .map_init(new_tally, |t, c| {
                    t.fails.iter_mut().for_each(|v| *v = 0);
                    let mut rng = mc_rng(*seed, c);
                    let mut x = vec![Elem::ZERO; n];
                    for _ in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(*trials) {
                        x.iter_mut().for_each(|e| *e = Elem(rng.random_range(0..q)));
                        t.run(s, &x, &seeds, d);
                    }
                    t.fails.clone()
                })
                .reduce(|| vec![0; lo.len()], add_vecs);
            (*trials, fails)
        }
    };

    let sampler = summary(s);
    let target = opts.target_delta.as_ref().map(|t| Bound {
        kind: "target".into(),
        value: to_f64(t),
        exact: Some(t.to_string()),
        applicability: Applicability::AsymptoticWithUnknownConstant,
    });
    let mut reports = Vec::new();
    for (f, &off) in families.iter().zip(&offsets) {
        for (i, member) in f.members().iter().enumerate() {
            let g = off + i;
            let mu = &mus[g];
            let p = fails[g] as f64 / trials as f64;
            let interval = match opts.mode {
                Mode::Exact => None,
                Mode::Mc { .. } => {
                    let half = Z99 * (p * (1.0 - p) / trials as f64).sqrt();
                    Some(Interval {
                        method: "normal-approximation (Wald)".into(),
                        level: 0.99,
                        lo: (p - half).max(0.0),
                        hi: (p + half).min(1.0),
                    })
                }
            };
            let dh = BigRational::new(fails[g].into(), trials.into());
            reports.push(EvalReport {
                schema_version: SCHEMA_VERSION.into(),
                sampler: sampler.clone(),
                subset: SubsetSummary {
                    family: f.name().into(),
                    id: member.id.clone(),
                    params: member.params.clone(),
                    size: member.size.to_string(),
                    density: mu.to_string(),
                    density_f64: to_f64(mu),
                },
                epsilon: opts.epsilon.to_string(),
                mode: match opts.mode {
                    Mode::Exact => "exact".into(),
                    Mode::Mc { .. } => "mc".into(),
                },
                trials,
                rng_seed: match opts.mode {
                    Mode::Exact => None,
                    Mode::Mc { seed, .. } => Some(seed),
                },
                sample_size: samples,
                failures: fails[g],
                delta_hat: dh.to_string(),
                delta_hat_f64: to_f64(&dh),
                interval,
                target_delta: target.clone(),
                predicted: predicted(s, mu, samples, &opts.epsilon),
            });
        }
    }
    Ok(reports)
}

trait PositiveRational {
    fn is_positive_rational(&self) -> bool;
}

impl PositiveRational for BigRational {
    fn is_positive_rational(&self) -> bool {
        *self > BigRational::zero()
    }
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

fn mc_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// `(x index, μ_{S(x)}(A))` rows for one member: every x in exact mode
/// (lexicographic index), otherwise one row per Monte Carlo trial.
pub fn mu_t_rows(s: &SamplerSpec, family: &Family, member: usize, mode: &Mode, cap: u64) -> Result<Vec<(u64, BigRational)>> {
    let q = s.field().q();
    let (n, d) = (s.n(), s.d());
    let seeds = all_seeds(q, d, cap)?;
    let samples = space::point_count(q, d).unwrap_or(u64::MAX);
    let mut pt = vec![Elem::ZERO; s.m()];
    let mut buf = Vec::new();
    let mut row = |x: &[Elem]| {
        let b = s.bind(x);
        let mut hits = 0u64;
        let seed_list: Vec<&[Elem]> = if d == 0 { vec![&[]] } else { seeds.chunks_exact(d).collect() };
        for y in seed_list {
            b.eval_into(y, &mut pt);
            buf.clear();
            family.incidences(&pt, &mut buf);
            hits += buf.contains(&(member as u32)) as u64;
        }
        BigRational::new(hits.into(), samples.into())
    };
    let mut out = Vec::new();
    let mut x = vec![Elem::ZERO; n];
    match mode {
        Mode::Exact => {
            for idx in 0..space::checked_count(q, n, cap)? {
                space::decode_point(q, idx, &mut x);
                out.push((idx, row(&x)));
            }
        }
        Mode::Mc { trials, seed } => {
            for c in 0..trials.div_ceil(MC_CHUNK) {
                let mut rng = mc_rng(*seed, c);
                for i in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(*trials) {
                    x.iter_mut().for_each(|e| *e = Elem(rng.random_range(0..q)));
                    out.push((i, row(&x)));
                }
            }
        }
    }
    Ok(out)
}

/// Writes `x_index,mu_t,mu_t_f64` rows as CSV.
pub fn write_histogram_csv<W: Write>(rows: &[(u64, BigRational)], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x_index", "mu_t", "mu_t_f64"]).map_err(io)?;
    for (i, v) in rows {
        wr.write_record([i.to_string(), v.to_string(), to_f64(v).to_string()]).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TwiseResult {
    pub seeds: Vec<Vec<u64>>,
    pub outcomes: u64,
    pub expected_count: u64,
    pub min_count: u64,
    pub max_count: u64,
    pub uniform: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TwiseReport {
    pub t: usize,
    pub results: Vec<TwiseResult>,
    pub ok: bool,
}

/// For each tuple of distinct seeds, checks that `(S(x, y_1), .., S(x, y_t))`
/// is exactly uniform on `(F_q^m)^t` over uniform `x`.
pub fn twise_check(s: &SamplerSpec, tuples: &[Vec<Vec<Elem>>], cap: u64) -> Result<TwiseReport> {
    let q = s.field().q();
    let (n, m) = (s.n(), s.m());
    let total = space::checked_count(q, n, cap)?;
    let t = tuples.first().map_or(0, Vec::len);
    let mut results = Vec::new();
    for tuple in tuples {
        if tuple.len() != t || tuple.iter().any(|y| y.len() != s.d() || y.iter().any(|e| e.0 >= q)) {
            return Err(Error::Dimension("seed tuples must have equal length and valid seeds".into()));
        }
        let distinct: HashSet<&Vec<Elem>> = tuple.iter().collect();
        if distinct.len() != tuple.len() {
            return Err(Error::DuplicateSeeds);
        }
        let outcomes = space::checked_count(q, t * m, cap)?;
        let mut counts = vec![0u64; outcomes as usize];
        let mut x = vec![Elem::ZERO; n];
        let mut joint = vec![Elem::ZERO; t * m];
        for idx in 0..total {
            space::decode_point(q, idx, &mut x);
            let b = s.bind(&x);
            for (j, y) in tuple.iter().enumerate() {
                b.eval_into(y, &mut joint[j * m..(j + 1) * m]);
            }
            counts[space::encode_point(q, &joint) as usize] += 1;
        }
        let (min_count, max_count) = (*counts.iter().min().unwrap_or(&0), *counts.iter().max().unwrap_or(&0));
        let expected = total / outcomes;
        results.push(TwiseResult {
            seeds: tuple.iter().map(|y| y.iter().map(|e| e.0).collect()).collect(),
            outcomes,
            expected_count: expected,
            min_count,
            max_count,
            uniform: total % outcomes == 0 && min_count == expected && max_count == expected,
        });
    }
    let ok = results.iter().all(|r| r.uniform);
    Ok(TwiseReport { t, results, ok })
}

/// `LIST_f(T, ε) = {x : Pr_y[f(x, y) ∈ T] > ε}`, in lexicographic order.
pub fn list_recovery(f: &SamplerSpec, target: &HashSet<Vec<Elem>>, epsilon: &BigRational, cap: u64) -> Result<Vec<Vec<Elem>>> {
    let q = f.field().q();
    let (n, d) = (f.n(), f.d());
    let total = space::checked_count(q, n, cap)?;
    let seeds = all_seeds(q, d, cap)?;
    let samples = BigInt::from(space::checked_count(q, d, cap)?);
    // count / q^d > ε  <=>  count * den > numer * q^d
    let (num, den) = (epsilon.numer().clone(), epsilon.denom().clone());
    let threshold = &num * &samples;
    let mut out = Vec::new();
    let mut x = vec![Elem::ZERO; n];
    let mut pt = vec![Elem::ZERO; f.m()];
    for idx in 0..total {
        space::decode_point(q, idx, &mut x);
        let b = f.bind(&x);
        let mut hits = 0u64;
        let seed_list: Vec<&[Elem]> = if d == 0 { vec![&[]] } else { seeds.chunks_exact(d).collect() };
        for y in seed_list {
            b.eval_into(y, &mut pt);
            hits += target.contains(&pt) as u64;
        }
        if BigInt::from(hits) * &den > threshold {
            out.push(x.clone());
        }
    }
    Ok(out)
}
