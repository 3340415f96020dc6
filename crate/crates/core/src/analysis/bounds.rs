//! Predicted confidence errors and the degree lower bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::{check_unit_open, to_f64};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    /// A rigorous bound at these parameters.
    ExactBound,
    /// Holds up to an unknown constant or only for sufficiently large q.
    AsymptoticWithUnknownConstant,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundQuery {
    /// Chebyshev for `samples` pairwise independent points of a set of density `mu`.
    Pairwise { mu: String, samples: u64, epsilon: String },
    /// t-wise tail `((t μN + t^2) / (εN)^2)^(t/2)` with constant 1.
    Twise { t: u32, mu: String, samples: u64, epsilon: String },
    /// `1/(ε^2 q)` for the line sampler.
    Line { q: u64, epsilon: String },
    /// `q^(-t/4)` for the degree-t curve sampler.
    Curve { q: u64, t: u32 },
    /// Extractor to sampler: `δ = 2 q^(k-n)`.
    EquivTwo { q: u64, k: i64, n: i64 },
    /// Extractor to sampler: `δ = ε q^(k-n)`.
    EquivEps { q: u64, k: i64, n: i64, epsilon: String },
    /// `max{1, log_q(k/δ)/2 - 1}` with `k = floor(q/2)`.
    DegreeLower { q: u64, delta: String },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Bound {
    pub kind: String,
    pub value: f64,
    /// Exact rational value where the formula is rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub applicability: Applicability,
}

fn rat(text: &str, q: Option<u64>) -> Result<BigRational> {
    crate::ratio::parse_ratio(text, q)
}

fn q_pow(q: u64, e: i64) -> BigRational {
    Pow::pow(&BigRational::from_integer(BigInt::from(q)), e as i32)
}

fn exact(kind: &str, v: BigRational, applicability: Applicability) -> Bound {
    Bound { kind: kind.into(), value: to_f64(&v), exact: Some(v.to_string()), applicability }
}

fn positive(name: &str, v: &BigRational) -> Result<()> {
    if !v.is_positive() {
        return Err(Error::Param(format!("{name} must be positive")));
    }
    Ok(())
}

fn check_q(q: u64) -> Result<()> {
    crate::gf::prime_power(q).map(|_| ())
}

pub fn bound_calculator(query: &BoundQuery) -> Result<Bound> {
    use Applicability::*;
    match query {
        BoundQuery::Pairwise { mu, samples, epsilon } => {
            let (mu, eps) = (rat(mu, None)?, rat(epsilon, None)?);
            positive("epsilon", &eps)?;
            if mu.is_negative() || mu > BigRational::one() || *samples == 0 {
                return Err(Error::Param("pairwise bound needs 0 <= mu <= 1 and samples >= 1".into()));
            }
            let n = BigRational::from_integer((*samples).into());
            let v = &mu * (BigRational::one() - &mu) / (n * &eps * &eps);
            Ok(exact("pairwise", v, ExactBound))
        }
        BoundQuery::Twise { t, mu, samples, epsilon } => {
            let (mu, eps) = (rat(mu, None)?, rat(epsilon, None)?);
            positive("epsilon", &eps)?;
            if *t == 0 || *samples == 0 || mu.is_negative() {
                return Err(Error::Param("t-wise bound needs t >= 1, samples >= 1, mu >= 0".into()));
            }
            let (t, n) = (*t as f64, *samples as f64);
            let a = to_f64(&eps) * n;
            let base = (t * to_f64(&mu) * n + t * t) / (a * a);
            let value = base.powf(t / 2.0);
            Ok(Bound { kind: "twise".into(), value, exact: None, applicability: AsymptoticWithUnknownConstant })
        }
        BoundQuery::Line { q, epsilon } => {
            check_q(*q)?;
            let eps = rat(epsilon, Some(*q))?;
            positive("epsilon", &eps)?;
            let v = BigRational::one() / (&eps * &eps * BigRational::from_integer((*q).into()));
            Ok(exact("line", v, ExactBound))
        }
        BoundQuery::Curve { q, t } => {
            check_q(*q)?;
            if *t < 4 {
                return Err(Error::Param("the curve bound is stated for t >= 4".into()));
            }
            let value = (*q as f64).powf(-(*t as f64) / 4.0);
            let exact = (*t % 4 == 0).then(|| q_pow(*q, -(*t as i64) / 4).to_string());
            Ok(Bound { kind: "curve".into(), value, exact, applicability: AsymptoticWithUnknownConstant })
        }
        BoundQuery::EquivTwo { q, k, n } => {
            check_q(*q)?;
            let v = BigRational::from_integer(2.into()) * q_pow(*q, k - n);
            Ok(exact("equiv-two", v, ExactBound))
        }
        BoundQuery::EquivEps { q, k, n, epsilon } => {
            check_q(*q)?;
            let eps = rat(epsilon, Some(*q))?;
            positive("epsilon", &eps)?;
            Ok(exact("equiv-eps", eps * q_pow(*q, k - n), ExactBound))
        }
        BoundQuery::DegreeLower { q, delta } => {
            check_q(*q)?;
            let delta = rat(delta, Some(*q))?;
            check_unit_open("delta", &delta)?;
            let k = (*q / 2) as f64;
            let v = 0.5 * (k / to_f64(&delta)).ln() / (*q as f64).ln() - 1.0;
            Ok(Bound { kind: "degree-lower".into(), value: v.max(1.0), exact: None, applicability: ExactBound })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let b = bound_calculator(&BoundQuery::Line { q: 32, epsilon: "0.5".into() }).unwrap();
        assert_eq!(b.exact.as_deref(), Some("1/8"));
        assert_eq!(b.applicability, Applicability::ExactBound);
        let b = bound_calculator(&BoundQuery::EquivTwo { q: 2, k: 3, n: 5 }).unwrap();
        assert_eq!(b.value, 0.5);
        let b = bound_calculator(&BoundQuery::DegreeLower { q: 16, delta: "1e-6".into() }).unwrap();
        assert!((b.value - 1.8666).abs() < 1e-3, "{}", b.value);
        let b = bound_calculator(&BoundQuery::DegreeLower { q: 16, delta: "1/2".into() }).unwrap();
        assert_eq!(b.value, 1.0);
        let b = bound_calculator(&BoundQuery::Curve { q: 16, t: 8 }).unwrap();
        assert_eq!(b.exact.as_deref(), Some("1/256"));
        assert_eq!(b.applicability, Applicability::AsymptoticWithUnknownConstant);
        let b = bound_calculator(&BoundQuery::Pairwise { mu: "1/2".into(), samples: 100, epsilon: "1/10".into() }).unwrap();
        assert_eq!(b.exact.as_deref(), Some("1/4"));
    }

    #[test]
    fn out_of_domain() {
        assert!(bound_calculator(&BoundQuery::Line { q: 32, epsilon: "0".into() }).is_err());
        assert!(bound_calculator(&BoundQuery::Line { q: 6, epsilon: "1/2".into() }).is_err());
        assert!(bound_calculator(&BoundQuery::DegreeLower { q: 16, delta: "2".into() }).is_err());
        assert!(bound_calculator(&BoundQuery::Curve { q: 16, t: 2 }).is_err());
    }
}
