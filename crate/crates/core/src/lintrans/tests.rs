use proptest::prelude::*;

use super::eta::{eta_rows, eta_rows_full};
use super::*;
use crate::exptail::{GhParams, NoiseDistribution};
use crate::Error;

fn m(rows: &[&[f64]]) -> CoefficientMatrix {
    CoefficientMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

#[test]
fn classification_examples() {
    let s = classify(&m(&[&[1.0, 0.5], &[1.0, 0.2]])).unwrap();
    assert_eq!(s.regime, Regime::AsymptoticDependence);
    assert_eq!(s.shared_argmax, vec![0]);
    assert_eq!(s.residual, [vec![0.5], vec![0.2]]);
    assert_eq!(classify(&m(&[&[1.0, 0.3], &[0.5, 1.0]])).unwrap().regime, Regime::AsymptoticIndependence);
    let b = classify(&m(&[&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]])).unwrap();
    assert_eq!(b.regime, Regime::Boundary);
    assert_eq!(b.shared_argmax, vec![0]);
}

#[test]
fn argmax_tolerance() {
    let a = m(&[&[1.0, 1.0 - 1e-14, 0.2], &[0.1, 0.2, 3.0]]);
    assert_eq!(a.argmax(0), &[0, 1]);
    let b = m(&[&[1.0, 1.0 - 1e-9], &[0.1, 0.2]]);
    assert_eq!(b.argmax(0), &[0]);
}

#[test]
fn invalid_matrices() {
    assert!(matches!(CoefficientMatrix::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]), Err(Error::Precondition(_))));
    assert!(CoefficientMatrix::new(vec![vec![1.0, -0.1], vec![1.0, 1.0]]).is_err());
    assert!(CoefficientMatrix::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
    assert!(CoefficientMatrix::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    let d = CoefficientMatrix::dropping_zero_columns(vec![vec![1.0, 0.0, 0.5], vec![1.0, 0.0, 0.2]]).unwrap();
    assert_eq!(d.cols(), 2);
    let three = m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]]);
    assert!(classify(&three).is_err());
    assert!(eta_closed_form(&m(&[&[1.0], &[1.0]])).is_err());
}

#[test]
fn eta_examples() {
    let eta = |rows: &[&[f64]]| eta_closed_form(&m(rows)).unwrap();
    assert_eq!(eta(&[&[1.0, 0.0], &[0.0, 1.0]]), 0.5);
    assert!((eta(&[&[1.0, 0.3], &[0.5, 1.0]]) - 0.85 / 1.2).abs() < 1e-15);
    assert_eq!(eta(&[&[1.0, 0.3], &[1.0, 0.5]]), 1.0);
    assert!((eta(&[&[1.0, 0.0, 0.0], &[0.4, 1.0, 0.7]]) - 1.0 / 1.6).abs() < 1e-15);
}

#[test]
fn oracle_examples() {
    let o = |rows: &[&[f64]]| eta_gauge_oracle(&m(rows)).unwrap();
    assert!((o(&[&[1.0, 0.0], &[0.0, 1.0]]) - 0.5).abs() < 1e-9);
    assert!((o(&[&[1.0, 0.3], &[0.5, 1.0]]) - 0.85 / 1.2).abs() < 1e-7);
    assert!((o(&[&[1.0, 0.0, 0.0], &[0.4, 1.0, 0.7]]) - 0.625).abs() < 1e-7);
    assert!((o(&[&[2.0, 0.6], &[2.0, 0.6]]) - 1.0).abs() < 1e-12);
    let big = CoefficientMatrix::new(vec![vec![1.0; 9], vec![0.5; 9]]).unwrap();
    assert!(matches!(eta_gauge_oracle(&big), Err(Error::Size(_))));
}

#[test]
fn example_two_grid() {
    for i in 0..10 {
        for j in 0..10 {
            let (a12, a21) = (i as f64 / 10.0, j as f64 / 10.0);
            let e = eta_closed_form(&m(&[&[1.0, a12], &[a21, 1.0]])).unwrap();
            let f = (1.0 - a12 * a21) / (2.0 - a12 - a21);
            assert!((e - f).abs() < 1e-12, "{a12} {a21}");
        }
    }
}

#[test]
fn correlation_examples() {
    assert_eq!(pearson_correlation(&m(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap(), 0.0);
    let c = pearson_correlation(&m(&[&[1.0, 0.0], &[0.4, 1.0]])).unwrap();
    assert!((c - 0.4 / 1.16f64.sqrt()).abs() < 1e-15);
    let wider = m(&[&[1.0, 0.0, 0.0], &[0.4, 1.0, 0.5]]);
    assert!(pearson_correlation(&wider).unwrap() < c);
    assert_eq!(eta_closed_form(&wider).unwrap(), eta_closed_form(&m(&[&[1.0, 0.0], &[0.4, 1.0]])).unwrap());
}

#[test]
fn product_model() {
    let p = product_to_sum(vec![vec![1.0, 0.3], vec![0.5, 1.0]]).unwrap();
    assert!((eta_closed_form(&p).unwrap() - 0.85 / 1.2).abs() < 1e-15);
    let q = product_to_sum(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert_eq!(eta_closed_form(&q).unwrap(), 0.5);
    let r = product_to_sum(vec![vec![1.0, 0.4], vec![1.0, 0.4]]).unwrap();
    assert_eq!(classify(&r).unwrap().regime, Regime::AsymptoticDependence);
}

#[test]
fn csv_and_json_round_trip() {
    let a = m(&[&[1.0, 0.3, 0.25], &[0.5, 1.0, 0.0]]);
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1,0.3,0.25\n0.5,1,0\n");
    let back = CoefficientMatrix::read_csv(&buf[..]).unwrap();
    assert_eq!(back, a);
    let with_header = CoefficientMatrix::read_csv("y1,y2\n1,0\n0,1\n".as_bytes()).unwrap();
    assert_eq!(with_header.cols(), 2);
    let j = serde_json::to_string(&a).unwrap();
    assert_eq!(j, "[[1.0,0.3,0.25],[0.5,1.0,0.0]]");
    assert_eq!(serde_json::from_str::<CoefficientMatrix>(&j).unwrap(), a);
}

fn nig() -> GhParams {
    GhParams::nig(1.0, 1.0, 0.0, 0.0).unwrap()
}

#[test]
fn chi_two_edges() {
    assert_eq!(chi_gh_two(0.5, 0.5, &nig()).unwrap(), 1.0);
    let c = chi_gh_two(0.3, 0.9, &nig()).unwrap();
    assert!(c > 0.0 && c < 1.0);
    let swapped = chi_gh_two(0.9, 0.3, &nig()).unwrap();
    assert!((c - swapped).abs() < 1e-12);
    let skew = GhParams::nig(1.0, 1.0, 0.0, 0.5).unwrap();
    assert!(matches!(chi_gh_two(0.3, 0.9, &skew), Err(Error::Unsupported(_))));
    assert!(chi_gh_two(1.0, 0.2, &nig()).is_err());
}

#[test]
fn chi_two_location_invariant() {
    let shifted = GhParams::nig(1.0, 1.0, 2.5, 0.0).unwrap();
    let a = chi_gh_two(0.3, 0.7, &nig()).unwrap();
    let b = chi_gh_two(0.3, 0.7, &shifted).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn chi_decreasing_in_a22() {
    let p = GhParams::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    let vals: Vec<f64> = (0..=12).map(|k| chi_gh_two(0.3, 0.35 + 0.05 * k as f64, &p).unwrap()).collect();
    for w in vals.windows(2) {
        assert!(w[1] < w[0], "{vals:?}");
    }
}

#[test]
fn chi_limits() {
    let p = GhParams::new(1.0, 2.0, 3.0, 0.0, 0.0).unwrap();
    assert_eq!(chi_limit_a22(0.3, &p).unwrap(), 0.0);
    let l = chi_limit_a22(0.3, &nig()).unwrap();
    assert!(l > 0.0 && l < 1.0);
    let near = chi_gh_two(0.3, 0.9999, &nig()).unwrap();
    assert!((near - l).abs() < 0.02, "{near} vs {l}");
    let l0 = chi_limit_a22(0.0, &nig()).unwrap();
    assert!(l0 > 0.0 && l0 < l);
}

#[test]
fn chi_mc_trivial_cases() {
    let d = NoiseDistribution::gh(nig()).unwrap();
    // An all-zero column violates the matrix invariants; dropping it leaves
    // the empty-residual model X1 = X2 = Y1.
    assert!(CoefficientMatrix::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
    let a = CoefficientMatrix::dropping_zero_columns(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let single = chi_mc(&a, &d, 1000, 3).unwrap();
    assert_eq!(single.value, 1.0);
    assert_eq!(single.std_error, 0.0);
    let same = chi_mc(&m(&[&[1.0, 0.4], &[1.0, 0.4]]), &d, 20_000, 3).unwrap();
    assert!((same.value - 1.0).abs() < 4.0 * same.std_error);
    let ai = chi_mc(&m(&[&[1.0, 0.3], &[0.5, 1.0]]), &d, 10, 1);
    assert!(matches!(ai, Err(Error::Regime { .. })));
}

#[test]
fn chi_mc_thread_independent() {
    let d = NoiseDistribution::gh(nig()).unwrap();
    let a = m(&[&[1.0, 0.3], &[1.0, 0.7]]);
    let n = 3 * crate::rng::CHUNK + 11;
    let x = chi_mc(&a, &d, n, 17).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let y = pool.install(|| chi_mc(&a, &d, n, 17).unwrap());
    assert_eq!(x, y);
}

#[test]
fn welford_merge_matches_sequential() {
    let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64 / 17.0).collect();
    let mut all = Welford::default();
    xs.iter().for_each(|&x| all.push(x));
    let mut a = Welford::default();
    let mut b = Welford::default();
    xs[..377].iter().for_each(|&x| a.push(x));
    xs[377..].iter().for_each(|&x| b.push(x));
    let ab = a.merge(b);
    let ba = b.merge(a);
    for w in [ab, ba] {
        assert!((w.mean() - all.mean()).abs() <= 1e-12 * all.mean().abs());
        assert!((w.variance() - all.variance()).abs() <= 1e-12 * all.variance());
    }
}

#[test]
fn summary_json() {
    let s = summarize(&m(&[&[1.0, 0.3], &[0.5, 1.0]]), None, SummaryOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    assert_eq!(v["regime"], "AsymptoticIndependence");
    assert!((v["eta"].as_f64().unwrap() - 0.708333333333).abs() < 1e-9);
    assert_eq!(v["eta_method"], "closed_form");
    let b = summarize(&m(&[&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]]), None, SummaryOptions::default()).unwrap();
    assert_eq!(b.chi, None);
    assert_eq!(b.chi_method, Some(ChiMethod::Undetermined));
    assert_eq!(b.eta, 1.0);
    let d = NoiseDistribution::gh(nig()).unwrap();
    let q = summarize(&m(&[&[1.0, 0.3], &[1.0, 0.7]]), Some(&d), SummaryOptions::default()).unwrap();
    assert_eq!(q.chi_method, Some(ChiMethod::Quadrature));
    assert!((q.chi.unwrap() - chi_gh_two(0.3, 0.7, &nig()).unwrap()).abs() < 1e-15);
}

fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(0.5), 0.0..1.0f64, 0.0..3.0f64]
}

fn matrix(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| (prop::collection::vec(entry(), n), prop::collection::vec(entry(), n)))
        .prop_filter("valid matrix", |(a, b)| {
            a.iter().any(|&v| v > 0.0) && b.iter().any(|&v| v > 0.0) && a.iter().zip(b).all(|(x, y)| x + y > 0.0)
        })
}

proptest! {
    #[test]
    fn hull_equals_full((a, b) in matrix(40)) {
        let ma = a.iter().cloned().fold(0.0, f64::max);
        let mb = b.iter().cloned().fold(0.0, f64::max);
        let r1: Vec<f64> = a.iter().map(|v| v / ma).collect();
        let r2: Vec<f64> = b.iter().map(|v| v / mb).collect();
        prop_assert_eq!(eta_rows(&r1, &r2), eta_rows_full(&r1, &r2));
    }

    #[test]
    fn hull_equals_full_on_grid_values(
        a in prop::collection::vec(0u8..5, 2..30),
        b in prop::collection::vec(0u8..5, 2..30),
    ) {
        let n = a.len().min(b.len());
        let r1: Vec<f64> = a[..n].iter().map(|&v| v as f64 / 4.0).collect();
        let r2: Vec<f64> = b[..n].iter().map(|&v| v as f64 / 4.0).collect();
        let full = eta_rows_full(&r1, &r2);
        prop_assert!((eta_rows(&r1, &r2) - full).abs() < 1e-12, "{} vs {}", eta_rows(&r1, &r2), full);
    }

    #[test]
    fn eta_range_and_scale_invariance((a, b) in matrix(8), s1 in 0.01..100.0f64, s2 in 0.01..100.0f64) {
        let base = CoefficientMatrix::new(vec![a.clone(), b.clone()]).unwrap();
        let eta = eta_closed_form(&base).unwrap();
        prop_assert!((0.5 - 1e-12..=1.0).contains(&eta));
        let scaled = CoefficientMatrix::new(vec![
            a.iter().map(|v| v * s1).collect(),
            b.iter().map(|v| v * s2).collect(),
        ]).unwrap();
        prop_assert!((eta_closed_form(&scaled).unwrap() - eta).abs() < 1e-12);
        prop_assert_eq!(classify(&scaled).unwrap().regime, classify(&base).unwrap().regime);
    }

    #[test]
    fn eta_matches_oracle((a, b) in matrix(6)) {
        let mat = CoefficientMatrix::new(vec![a, b]).unwrap();
        let c = eta_closed_form(&mat).unwrap();
        let o = eta_gauge_oracle(&mat).unwrap();
        prop_assert!((c - o).abs() < 1e-7, "closed {} oracle {}", c, o);
    }

    #[test]
    fn regime_agrees_with_eta((a, b) in matrix(8)) {
        let mat = CoefficientMatrix::new(vec![a, b]).unwrap();
        let eta = eta_closed_form(&mat).unwrap();
        match classify(&mat).unwrap().regime {
            Regime::AsymptoticIndependence => prop_assert!(eta < 1.0),
            _ => prop_assert_eq!(eta, 1.0),
        }
    }

    #[test]
    fn example_two_monotone(a12 in 0.0..0.99f64, lo in 0.0..0.98f64, step in 0.001..0.01f64) {
        let e = |a21: f64| eta_closed_form(&CoefficientMatrix::new(vec![vec![1.0, a12], vec![a21, 1.0]]).unwrap()).unwrap();
        prop_assert!(e((lo + step).min(1.0)) >= e(lo));
    }
}
