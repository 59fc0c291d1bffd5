use exdep::special::{bessel_k, ln_bessel_k};

fn fixtures() -> Vec<(f64, f64, f64)> {
    let text = include_str!("fixtures/bessel_k.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn reproduces_high_precision_values() {
    let rows = fixtures();
    assert!(rows.len() > 200);
    let mut worst = 0.0f64;
    for (nu, x, ln_ref) in rows {
        let ln = ln_bessel_k(nu, x);
        // |d ln K| bounds the relative error of K itself.
        let err = (ln - ln_ref).abs();
        worst = worst.max(err);
        assert!(err < 1e-10, "nu={nu} x={x}: {ln} vs {ln_ref}");
        if ln_ref.abs() < 700.0 {
            let rel = (bessel_k(nu, x) / ln_ref.exp() - 1.0).abs();
            assert!(rel < 1e-10, "nu={nu} x={x}: rel {rel:e}");
        }
    }
    println!("worst log error {worst:e}");
}
