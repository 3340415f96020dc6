use std::io::Write;

use curvesamp::analysis::{
    bound_calculator, confidence_error, twise_check, BoundQuery, EvalOptions, Family, FamilySpec, Mode,
};
use curvesamp::construction::{
    build_inner, build_outer, build_samp, construction_report, inner_params, ledger_violations, matches_plan,
    outer_params, plan_inner, plan_outer, plan_samp, PlanNode,
};
use curvesamp::gf::{Elem, Field};
use curvesamp::polymap::{interpolate, univariate_degree};
use curvesamp::ratio::parse_ratio;
use curvesamp::samplers::{curve_sampler, line_sampler, SamplerSpec, SCHEMA_VERSION};
use curvesamp::{space, Error};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CommandKind, ModeArg, RunConfig, SamplerKind};

/// Term cap for symbolic expansion during `verify`.
const VERIFY_TERM_CAP: usize = 1 << 16;
/// Largest field in which `verify` interpolates curves over every seed.
const INTERPOLATION_MAX_Q: u64 = 1 << 12;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Core(Error),
    Io(String),
    /// `verify` ran but a hard check failed.
    Verify,
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verify => 1,
            Failure::Io(_) => 4,
            Failure::Core(e) => match e {
                Error::CapExceeded { .. } | Error::TermCap(_) | Error::FieldTooLarge { .. } => 3,
                Error::Internal(_) => 4,
                _ => 2,
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Config(s) | Failure::Io(s) => s.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Verify => "verification failed".into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Out<T> = Result<T, Failure>;

struct Ctx {
    field: Field,
    cfg: RunConfig,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Out<Ctx> {
        let field = Field::parse(&cfg.field)?;
        Ok(Ctx { field, cfg })
    }

    fn q(&self) -> u64 {
        self.field.q()
    }

    fn delta(&self) -> Out<BigRational> {
        let text = self.cfg.delta.as_deref().ok_or_else(|| Failure::Config("--delta is required".into()))?;
        Ok(parse_ratio(text, Some(self.q()))?)
    }

    fn epsilon(&self) -> Out<BigRational> {
        Ok(parse_ratio(&self.cfg.epsilon, Some(self.q()))?)
    }

    fn m(&self) -> u64 {
        self.cfg.m as u64
    }

    fn sampler(&self) -> Out<SamplerSpec> {
        let f = &self.field;
        Ok(match self.cfg.sampler_kind() {
            SamplerKind::Line | SamplerKind::Auto => line_sampler(f, self.cfg.m)?,
            SamplerKind::Curve => curve_sampler(f, self.cfg.m, self.cfg.curve_t.unwrap_or(2))?,
            SamplerKind::Outer => build_outer(f, self.m(), &self.delta()?)?,
            SamplerKind::Inner => build_inner(f, self.m(), &self.delta()?)?,
            SamplerKind::Samp => build_samp(f, self.m(), &self.delta()?)?,
        })
    }

    fn plan(&self) -> Out<Option<PlanNode>> {
        let (q, m) = (self.q(), self.m());
        Ok(match self.cfg.sampler_kind() {
            SamplerKind::Outer => Some(plan_outer(&outer_params(q, m, &self.delta()?)?)),
            SamplerKind::Inner => Some(plan_inner(&inner_params(q, m, &self.delta()?)?)),
            SamplerKind::Samp => Some(plan_samp(q, m, &self.delta()?)?),
            _ => None,
        })
    }

    fn target_delta(&self) -> Out<Option<BigRational>> {
        match self.cfg.sampler_kind() {
            SamplerKind::Outer | SamplerKind::Inner | SamplerKind::Samp => Ok(Some(self.delta()?)),
            _ => Ok(None),
        }
    }
}

/// Runs one command, writing its report to `--out` or `stdout`.
pub fn run(cmd: CommandKind, cfg: RunConfig, stdout: &mut dyn Write) -> Out<()> {
    let ctx = Ctx::new(cfg)?;
    let mut body = Vec::new();
    let mut verify_ok = true;
    match cmd {
        CommandKind::Params => json(&mut body, &params(&ctx)?)?,
        CommandKind::Build => json(&mut body, &ctx.sampler()?.descriptor())?,
        CommandKind::Sample => sample(&ctx, &mut body)?,
        CommandKind::Eval => json(&mut body, &eval(&ctx)?)?,
        CommandKind::Verify => {
            let rep = verify(&ctx)?;
            verify_ok = rep.ok;
            json(&mut body, &rep)?
        }
        CommandKind::Bounds => json(&mut body, &bounds(&ctx)?)?,
    }
    match &ctx.cfg.out {
        Some(path) => std::fs::write(path, &body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(&body).map_err(|e| Failure::Io(e.to_string()))?,
    }
    if verify_ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn json<T: Serialize>(buf: &mut Vec<u8>, v: &T) -> Out<()> {
    serde_json::to_writer_pretty(&mut *buf, v).map_err(|e| Failure::Core(Error::Internal(e.to_string())))?;
    buf.push(b'\n');
    Ok(())
}

fn params(ctx: &Ctx) -> Out<curvesamp::construction::ConstructionReport> {
    let rep = construction_report(ctx.q(), ctx.m(), &ctx.delta()?)?;
    if !rep.ledger_ok {
        return Err(Failure::Core(Error::Internal(rep.ledger_violations.join("; "))));
    }
    Ok(rep)
}

fn parse_x(ctx: &Ctx, n: usize) -> Out<Vec<Elem>> {
    let q = ctx.q();
    match &ctx.cfg.x {
        Some(text) => {
            let x = text
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    let s = s.trim();
                    let s = s.strip_prefix("0x").unwrap_or(s);
                    u64::from_str_radix(s, 16)
                        .map_err(|e| Failure::Config(format!("bad hex element {s:?}: {e}")))
                        .and_then(|v| ctx.field.elem(v).map_err(Failure::from))
                })
                .collect::<Out<Vec<Elem>>>()?;
            if x.len() != n {
                return Err(Failure::Config(format!("--x needs {n} elements, got {}", x.len())));
            }
            Ok(x)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.rng_seed);
            Ok((0..n).map(|_| Elem(rng.random_range(0..q))).collect())
        }
    }
}

fn sample(ctx: &Ctx, out: &mut Vec<u8>) -> Out<()> {
    let s = ctx.sampler()?;
    let x = parse_x(ctx, s.n())?;
    let (q, d, m) = (ctx.q(), s.d(), s.m());
    let seeds = space::checked_count(q, d, ctx.cfg.cap_states)?;
    let io = |e: csv::Error| Failure::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["seed_index".to_string()];
    header.extend((0..d).map(|i| format!("y{i}")));
    header.extend((0..m).map(|i| format!("s{i}")));
    w.write_record(&header).map_err(io)?;
    let b = s.bind(&x);
    let (mut y, mut pt) = (vec![Elem::ZERO; d], vec![Elem::ZERO; m]);
    for idx in 0..seeds {
        space::decode_point(q, idx, &mut y);
        b.eval_into(&y, &mut pt);
        let mut row = vec![idx.to_string()];
        row.extend(y.iter().chain(&pt).map(|e| format!("{e:x}")));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(())
}

fn eval(ctx: &Ctx) -> Out<Vec<curvesamp::analysis::EvalReport>> {
    let s = ctx.sampler()?;
    let specs = FamilySpec::parse_list(&ctx.cfg.family, ctx.cfg.rng_seed)?;
    let families = specs.iter().map(|sp| Family::new(sp, &ctx.field, s.m())).collect::<Result<Vec<_>, _>>()?;
    let opts = EvalOptions {
        epsilon: ctx.epsilon()?,
        mode: match ctx.cfg.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Mc => Mode::Mc { trials: ctx.cfg.trials, seed: ctx.cfg.rng_seed },
        },
        cap_states: ctx.cfg.cap_states,
        target_delta: ctx.target_delta()?,
    };
    Ok(confidence_error(&s, &families, &opts)?)
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    /// `PASS`, `FAIL` or `SKIP`.
    pub status: &'static str,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub schema_version: String,
    pub sampler: curvesamp::samplers::SamplerDescriptor,
    pub checks: Vec<Check>,
    pub ok: bool,
}

fn check(checks: &mut Vec<Check>, name: &str, status: &'static str, detail: String) {
    checks.push(Check { name: name.into(), status, detail });
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify(ctx: &Ctx) -> Out<VerifyReport> {
    let s = ctx.sampler()?;
    let q = ctx.q();
    let cap = ctx.cfg.cap_states;
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.rng_seed);

    if let Some(plan) = ctx.plan()? {
        let v = ledger_violations(&plan);
        check(&mut checks, "dimension-ledger", pass_fail(v.is_empty()), v.join("; "));
        let ok = matches_plan(&plan, &s.provenance());
        check(&mut checks, "wiring", pass_fail(ok), "built tree matches the planned tree node by node".into());
    }

    // the precomputed evaluator agrees with direct evaluation
    let mut agree = true;
    for _ in 0..8 {
        let x: Vec<Elem> = (0..s.n()).map(|_| Elem(rng.random_range(0..q))).collect();
        let b = s.bind(&x);
        let mut out = vec![Elem::ZERO; s.m()];
        for _ in 0..4 {
            let y: Vec<Elem> = (0..s.d()).map(|_| Elem(rng.random_range(0..q))).collect();
            b.eval_into(&y, &mut out);
            agree &= s.eval(&x, &y)? == out;
        }
    }
    check(&mut checks, "bound-evaluation", pass_fail(agree), "bind(x) agrees with eval on 32 random points".into());

    match s.to_polymap(VERIFY_TERM_CAP) {
        Ok(map) => {
            let deg = map.degree();
            check(
                &mut checks,
                "symbolic-degree",
                pass_fail(deg <= s.degree()),
                format!("degree {deg}, declared bound {}", s.degree()),
            );
        }
        Err(Error::TermCap(c)) => {
            check(&mut checks, "symbolic-degree", "SKIP", format!("expansion exceeds {c} terms"))
        }
        Err(e) => return Err(e.into()),
    }

    if s.d() == 1 && q <= INTERPOLATION_MAX_Q {
        let ys: Vec<Elem> = ctx.field.elements().collect();
        let mut worst = 0;
        for _ in 0..4 {
            let x: Vec<Elem> = (0..s.n()).map(|_| Elem(rng.random_range(0..q))).collect();
            let b = s.bind(&x);
            let mut cols = vec![Vec::with_capacity(ys.len()); s.m()];
            let mut out = vec![Elem::ZERO; s.m()];
            for &y in &ys {
                b.eval_into(&[y], &mut out);
                for (c, &v) in cols.iter_mut().zip(&out) {
                    c.push(v);
                }
            }
            for c in &cols {
                worst = worst.max(univariate_degree(&interpolate(&ctx.field, &ys, c)?));
            }
        }
        let bound = s.curve_degree().min(q - 1);
        check(
            &mut checks,
            "curve-degree",
            pass_fail(worst <= bound),
            format!("interpolated degree {worst}, declared bound {bound}"),
        );
    }

    if let Some((_, m, t, qe)) = s.basic_shape() {
        let t = t.min(q as usize);
        let fits = qe == q
            && space::checked_count(q, s.n(), cap).is_ok()
            && space::checked_count(q, t * m, cap).is_ok();
        if fits {
            let tuple: Vec<Vec<Elem>> = (0..t as u64).map(|y| vec![Elem(y)]).collect();
            let rep = twise_check(&s, &[tuple], cap)?;
            check(
                &mut checks,
                "t-wise-independence",
                pass_fail(rep.ok),
                format!("{t} seeds, {} joint outcomes", rep.results[0].outcomes),
            );
        } else {
            check(&mut checks, "t-wise-independence", "SKIP", "enumeration exceeds --cap-states".into());
        }
    }

    let ok = checks.iter().all(|c| c.status != "FAIL");
    Ok(VerifyReport { schema_version: SCHEMA_VERSION.into(), sampler: s.descriptor(), checks, ok })
}

#[derive(Serialize)]
pub struct BoundRow {
    pub query: BoundQuery,
    pub bound: curvesamp::analysis::Bound,
}

fn bounds(ctx: &Ctx) -> Out<Vec<BoundRow>> {
    let q = ctx.q();
    let eps = ctx.cfg.epsilon.clone();
    let mut queries = vec![BoundQuery::Line { q, epsilon: eps.clone() }];
    if let Some(t) = ctx.cfg.curve_t.filter(|&t| t >= 4) {
        queries.push(BoundQuery::Curve { q, t: t as u32 });
    }
    if let Some(delta) = &ctx.cfg.delta {
        queries.push(BoundQuery::DegreeLower { q, delta: delta.clone() });
    }
    if let Some(samples) = ctx.cfg.samples {
        let mu = ctx.cfg.mu.clone();
        queries.push(BoundQuery::Pairwise { mu: mu.clone(), samples, epsilon: eps.clone() });
        let t = ctx.cfg.curve_t.unwrap_or(2) as u32;
        queries.push(BoundQuery::Twise { t, mu, samples, epsilon: eps.clone() });
    }
    if let (Some(k), Some(n)) = (ctx.cfg.source_k, ctx.cfg.source_n) {
        queries.push(BoundQuery::EquivTwo { q, k, n });
        queries.push(BoundQuery::EquivEps { q, k, n, epsilon: eps });
    }
    queries
        .into_iter()
        .map(|query| {
            let bound = bound_calculator(&query)?;
            Ok(BoundRow { query, bound })
        })
        .collect()
}
