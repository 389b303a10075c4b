#![allow(clippy::excessive_precision)]

use lexsim::stats::{aggregate, fit_mapshare, student_t_sf, welch_t, SharePoint};

/// Two-sided Student-t tail probabilities computed at 50 significant digits.
const T_GRID: &[(f64, f64, f64)] = &[
    (0.5, 1.0, 0.70483276469913345165),
    (1.0, 1.0, 0.5),
    (2.5, 1.0, 0.24223788318168679745),
    (12.7062, 1.0, 0.05000001856071039947),
    (0.3, 2.0, 0.79248566084017761065),
    (1.5, 2.5, 0.24783645308629626111),
    (2.0, 3.0, 0.13932596855884317685),
    (3.0, 4.0, 0.039941968071718827276),
    (-1.224744871391589, 4.0, 0.28786413472669069868),
    (1.0, 7.3, 0.34929845645311450257),
    (2.2, 10.0, 0.05244106844935315022),
    (4.0, 15.0, 0.0011593168497611156181),
    (0.1, 30.0, 0.92100961179027115171),
    (1.96, 60.0, 0.054644929736529251355),
    (5.0, 100.0, 2.450173413503800423e-6),
    (10.0, 250.0, 5.0624171614457825507e-20),
    (3.5, 1000.0, 0.00048577434596783224126),
    (0.75, 0.5, 0.6696651342825102557),
    (8.0, 5.0, 0.00049290666057244408449),
    (25.0, 12.0, 1.0164797615466316479e-11),
];

#[test]
fn t_tail_matches_high_precision_values() {
    for &(t, df, want) in T_GRID {
        let got = student_t_sf(t, df);
        assert!((got - want).abs() <= 1e-10, "t={t} df={df}: {got} vs {want}");
        assert_eq!(student_t_sf(-t, df), got);
    }
}

#[test]
fn t_tail_decreases_towards_zero() {
    let mut last = 1.0;
    for i in 0..200 {
        let p = student_t_sf(i as f64 * 0.25, 30.0);
        assert!(p <= last);
        last = p;
    }
    assert!(last < 1e-12);
}

#[test]
fn welch_small_example_matches_reference() {
    let a = aggregate(&[1.0, 2.0, 3.0]).unwrap();
    let b = aggregate(&[2.0, 3.0, 4.0]).unwrap();
    let r = welch_t(&a, &b).unwrap();
    assert!((r.t + 1.224744871391589).abs() < 1e-12);
    assert!((r.df - 4.0).abs() < 1e-12);
    assert!((r.p - 0.2878641347266908).abs() < 1e-12);
}

#[test]
fn law_parameters_recovered_from_noiseless_grid() {
    for (a, b) in [(4.0f64, 2.0f64), (1.5, 3.0), (0.7, 1.2)] {
        let points: Vec<SharePoint> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .flat_map(|&p| {
                (2..=10).map(move |k| SharePoint { p_sm: p, k: k as f64, ratio: a.powf(p) * b.powf(-(k as f64)) })
            })
            .collect();
        let fit = fit_mapshare(&points).unwrap();
        assert!((fit.ln_a - a.ln()).abs() < 1e-9);
        assert!((fit.ln_b - b.ln()).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }
}
