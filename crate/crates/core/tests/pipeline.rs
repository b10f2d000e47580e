use geofix::iteration::{halpern_run, km_run, viscosity_run};
use geofix::rates::{km_bound_report, visc_bound_report, visc_constants, BOUND_TOL};
use geofix::{AnchorConvention, IterationConfig, ModelSpace, OperatorSpec, Schedule};

#[test]
fn km_trace_to_csv_and_report() {
    let s = ModelSpace::hyperbolic(2).unwrap();
    let x0 = s.from_spatial(&[0.3, -0.2]).unwrap();
    let op = OperatorSpec::EllipticRotation { angle: 2.0 };
    let sched = Schedule::constant(0.5);
    let cfg = IterationConfig::new(x0, 100, sched.clone()).with_fixed_point(s.base_point());
    let trace = km_run(&s, &op, &cfg).unwrap();
    assert_eq!(trace.rows.len(), 101);

    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 102);
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|f| f.parse().unwrap())
        .collect();
    assert_eq!(last[0], trace.last().residual);

    let rep = km_bound_report(&trace, &sched, 1.0, BOUND_TOL).unwrap();
    assert!(!rep.violated);
    assert_eq!(rep.rows.len(), 100);
}

#[test]
fn halpern_conventions_differ_but_both_converge() {
    let s = ModelSpace::hyperbolic(3).unwrap();
    let x0 = s.from_spatial(&[0.5, 0.1, -0.4]).unwrap();
    let op = OperatorSpec::EllipticRotation { angle: 0.9 };
    let runs: Vec<_> = AnchorConvention::BOTH
        .into_iter()
        .map(|conv| {
            let schedule = match conv {
                AnchorConvention::AnchorWeightLambda => Schedule::Harmonic,
                AnchorConvention::AnchorWeightOneMinusLambda => Schedule::KmRatio,
            };
            let cfg = IterationConfig::new(x0.clone(), 2000, schedule)
                .with_anchor(x0.clone())
                .with_convention(conv)
                .with_fixed_point(s.base_point());
            halpern_run(&s, &op, &cfg).unwrap()
        })
        .collect();
    for t in &runs {
        assert!(t.last().residual < 5e-3);
    }
    assert_ne!(runs[0].meta.convention, runs[1].meta.convention);
}

#[test]
fn viscosity_pipeline() {
    let s = ModelSpace::hyperbolic(2).unwrap();
    let x0 = s.from_spatial(&[1.0, 0.0]).unwrap();
    let xbar = s.base_point();
    let t = OperatorSpec::EllipticRotation { angle: 1.0 };
    let f = OperatorSpec::geodesic_contraction(s.from_spatial(&[0.0, 0.7]).unwrap(), 0.5).unwrap();
    let cfg = IterationConfig::new(x0.clone(), 500, Schedule::Viscosity { beta: 0.5 });
    let trace = viscosity_run(&s, &t, &f, &cfg).unwrap();
    let consts = visc_constants(&s, &x0, &xbar, &f, 0.5).unwrap();
    assert!(!visc_bound_report(&trace, &consts, BOUND_TOL).unwrap().violated());
}
