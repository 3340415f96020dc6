use curvesamp::analysis::{confidence_error, EvalOptions, Family, FamilySpec, Mode, DEFAULT_CAP_STATES};
use curvesamp::construction::{build_samp, construction_report, matches_plan, plan_samp};
use curvesamp::gf::{Elem, Field};
use curvesamp::ratio::parse_ratio;
use curvesamp::space;
use num_rational::BigRational;

#[test]
fn samp_builds_evaluates_and_reports() {
    let f = Field::parse("2^4").unwrap();
    let delta = parse_ratio("q^-2", Some(16)).unwrap();
    let s = build_samp(&f, 2, &delta).unwrap();
    let rep = construction_report(16, 2, &delta).unwrap();
    assert!(rep.ledger_ok && rep.buildable);
    assert_eq!((s.n() as u64, s.d() as u64, s.m() as u64), (rep.n, rep.seed_length, rep.output_length));
    assert!(matches_plan(&plan_samp(16, 2, &delta).unwrap(), &s.provenance()));

    let x: Vec<Elem> = (0..s.n() as u64).map(|i| Elem((7 * i + 3) % 16)).collect();
    let set = s.sample_set(&x).unwrap();
    assert_eq!(set.len(), 16);
    assert!(set.iter().all(|p| p.len() == 2 && p.iter().all(|e| e.0 < 16)));

    let fams: Vec<Family> = FamilySpec::defaults(4).iter().map(|sp| Family::new(sp, &f, 2).unwrap()).collect();
    let opts = EvalOptions {
        epsilon: BigRational::new(1.into(), 4.into()),
        mode: Mode::Mc { trials: 500, seed: 4 },
        cap_states: DEFAULT_CAP_STATES,
        target_delta: Some(delta),
    };
    let a = confidence_error(&s, &fams, &opts).unwrap();
    let b = confidence_error(&s, &fams, &opts).unwrap();
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    assert!(a.iter().all(|r| r.failures <= r.trials && r.sample_size == 16));
}

#[test]
fn descriptor_round_trips_through_json() {
    let f = Field::parse("5").unwrap();
    let s = curvesamp::samplers::curve_sampler(&f, 2, 3).unwrap();
    let v = serde_json::to_value(s.descriptor()).unwrap();
    assert_eq!(v["n"], 6);
    assert_eq!(v["declared_curve_degree"], 2);
    assert_eq!(v["provenance"]["kind"], "curve");
    assert_eq!(space::point_count(5, s.n()), Some(15625));
}
