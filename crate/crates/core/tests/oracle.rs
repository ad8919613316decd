//! Published values, checked one by one.

use gfgm_core::aggregate::LatticePmf;
use gfgm_core::allocation::Allocation;
use gfgm_core::bernoulli::{
    exchangeable_lift, sum_pmf, validate_membership, BernoulliPmf, MarginVector,
};
use gfgm_core::bounds::{bounds_common_p, BoundsOptions, CommonAggregator};
use gfgm_core::copula::{pearson_x, Driver, GfgmSpec};
use gfgm_core::margins::{DiscreteMargin, Margin};
use gfgm_core::risk::{frechet_var_bounds, MeasureRequest, RiskDistribution};
use gfgm_core::scalar::ExactScalar;
use gfgm_core::sum_polytope::{
    convex_order_leq, count_extremal, extremal_points, min_convex, sigma_cx_smallest_blocks, SumPmf,
};
use gfgm_core::tables;
use gfgm_core::Rational as Q;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn d5() -> Vec<SumPmf<Q>> {
    extremal_points(5, &q(1, 2))
        .unwrap()
        .iter()
        .map(|e| e.pmf(5))
        .collect()
}

fn lattice(g: &SumPmf<Q>) -> LatticePmf<f64> {
    LatticePmf::new(1.0, g.to_f64())
}

fn r1() -> BernoulliPmf<Q> {
    tables::example_final_vertices()
        .into_iter()
        .find(|(n, _)| n == "r1")
        .unwrap()
        .1
}

fn final_discrete() -> Vec<DiscreteMargin<f64>> {
    tables::example_final_margins()
        .into_iter()
        .map(|m| match m {
            Margin::Discrete(dm) => dm,
            _ => unreachable!(),
        })
        .collect()
}

#[test]
fn extremal_counts() {
    assert_eq!(count_extremal(5, &q(1, 2)).unwrap(), 9);
    assert_eq!(extremal_points(100, &q(1, 2)).unwrap().len(), 2501);
    assert_eq!(count_extremal(100, &q(1, 2)).unwrap(), 2501);
    assert_eq!(count_extremal(100, &q(1, 3)).unwrap(), 2278);
    let g = &d5()[0];
    assert_eq!(g.value(0), &q(1, 6));
    assert_eq!(g.value(3), &q(5, 6));
}

#[test]
fn convex_minimum_supports() {
    let g = min_convex(100, &q(1, 3)).unwrap();
    let support: Vec<usize> = (0..=100).filter(|&k| *g.value(k) != q(0, 1)).collect();
    assert_eq!(support, vec![33, 34]);
    let g = min_convex(100, &q(1, 2)).unwrap();
    assert_eq!(g.value(50), &q(1, 1));
}

#[test]
fn block_construction_d100() {
    let b = sigma_cx_smallest_blocks(100, &q(1, 3)).unwrap();
    let runs: Vec<usize> = b
        .atoms()
        .iter()
        .map(|(x, _)| x.iter().filter(|&&v| v).count())
        .collect();
    assert_eq!(runs, vec![33, 34, 33]);
    assert!(b.atoms().iter().all(|(_, w)| *w == q(1, 3)));
    assert_eq!(b.sum_pmf(), min_convex(100, &q(1, 3)).unwrap());
}

#[test]
fn counterexample_drivers() {
    let [f, f1, f2]: [BernoulliPmf<Q>; 3] = tables::counterexample_drivers().try_into().unwrap();
    let p = MarginVector::common(3, q(2, 5)).unwrap();
    for g in [&f, &f1, &f2] {
        assert!(validate_membership(g, &p).unwrap());
    }
    assert_eq!(sum_pmf(&f), sum_pmf(&f2));
    assert!(convex_order_leq(&sum_pmf(&f), &sum_pmf(&f1)));

    let sums = tables::counterexample_sums().unwrap();
    let head = [
        0.0080, 0.0338, 0.0640, 0.1328, 0.2467, 0.2592, 0.2312, 0.0242,
    ];
    for (k, &v) in head.iter().enumerate() {
        close(sums[0].pmf[k], v, 1e-4);
    }
    // the convex-order smaller driver gives the larger variance here
    close(sums[0].std().powi(2), 2.0633, 1e-3);
    close(sums[1].std().powi(2), 1.8865, 1e-3);
}

#[test]
fn exchangeable_lift_of_two_point_pmf() {
    let g = &d5()[8];
    assert_eq!(g.value(2), &q(5, 6));
    let e = exchangeable_lift(g).unwrap();
    for (i, v) in e.values().iter().enumerate() {
        let want = match (i as u32).count_ones() {
            2 => q(1, 12),
            5 => q(1, 6),
            _ => q(0, 1),
        };
        assert_eq!(v, &want, "index {i}");
    }
}

#[test]
fn pearson_under_final_margins() {
    let margins = tables::example_final_margins();
    let spec = GfgmSpec::new(tables::example_final_p(), Driver::Dense(r1())).unwrap();
    close(pearson_x(&spec, &margins, 0, 1).unwrap(), 0.0605, 5e-5);
    close(pearson_x(&spec, &margins, 0, 2).unwrap(), -0.1610, 5e-5);
}

#[test]
fn exponential_pearson_is_bernoulli_covariance() {
    let spec = GfgmSpec::new(tables::example_final_p(), Driver::Dense(r1())).unwrap();
    let margins = vec![Margin::Exponential { rate: 0.1 }; 3];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        close(
            pearson_x(&spec, &margins, a, b).unwrap(),
            spec.bernoulli_cov(a, b).unwrap().to_f64(),
            1e-12,
        );
    }
}

#[test]
fn bernoulli_sum_measures() {
    let g = d5();
    let r9 = lattice(&g[8]);
    assert_eq!(r9.var(0.8), 2.0);
    close(r9.es(0.8), 4.5, 1e-12);
    close(
        lattice(&g[0]).entropic(0.1).unwrap(),
        10.0 * (1.0 / 6.0 + 5.0 / 6.0 * 0.3f64.exp()).ln(),
        1e-12,
    );
    close(lattice(&g[0]).entropic(0.1).unwrap(), 2.5584, 5e-5);

    let psi: Vec<f64> = g
        .iter()
        .map(|x| lattice(x).entropic(0.1).unwrap())
        .collect();
    let argmin = (0..9).min_by(|&a, &b| psi[a].total_cmp(&psi[b])).unwrap();
    let argmax = (0..9).max_by(|&a, &b| psi[a].total_cmp(&psi[b])).unwrap();
    assert_eq!((argmin, argmax), (6, 2));
    close(psi[6], 2.5125, 5e-5);
    close(psi[2], 2.8093, 5e-5);
}

#[test]
fn var_minimum_is_not_inherited() {
    let g = d5();
    let bern: Vec<f64> = g.iter().map(|x| lattice(x).var(0.8)).collect();
    let min = bern.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(min, 2.0);
    assert_eq!(bern.iter().position(|&v| v == min), Some(8));

    let r = bounds_common_p(
        &Margin::Uniform,
        5,
        &q(1, 2),
        &[MeasureRequest::Var(0.8)],
        &BoundsOptions::default(),
    )
    .unwrap();
    let e = &r.extrema[0];
    assert_eq!((e.min_id.as_str(), e.max_id.as_str()), ("(2,3)", "(0,5)"));
    close(e.min, 2.9729, 1e-2);
    close(e.max, 3.4928, 1e-2);
}

#[test]
fn uniform_fgm_entries() {
    let v = tables::fgm_d5_values(tables::FGM_GRID).unwrap();
    close(v[6][1], 3.2753, 1e-2);
    close(v[2][0], 3.4928, 1e-2);
}

#[test]
fn frechet_bounds() {
    let (lo, hi) = frechet_var_bounds(&tables::margin_exp(), 100, 0.95);
    close(lo, 842.3299, 1e-4);
    close(hi, 3995.7323, 1e-4);
    let (_, hi) = frechet_var_bounds(&tables::margin_f(), 100, 0.95);
    close(hi, 9606.61, 5e-3);
}

#[test]
fn d100_convex_bounds() {
    let ms = [MeasureRequest::Es(0.95)];
    let r = bounds_common_p(
        &tables::margin_exp(),
        100,
        &q(1, 3),
        &ms,
        &BoundsOptions::default(),
    )
    .unwrap();
    close(r.extrema[0].min, 1191.2742, 1e-2);
    close(r.extrema[0].max, 1858.1846, 1e-2);
    let r = bounds_common_p(
        &tables::margin_f(),
        100,
        &q(2, 3),
        &ms,
        &BoundsOptions::default(),
    )
    .unwrap();
    close(r.extrema[0].max, 4440.057, 5e-2);
}

#[test]
fn d100_var_bounds() {
    let ms = [MeasureRequest::Var(0.95)];
    let r = bounds_common_p(
        &tables::margin_exp(),
        100,
        &q(1, 2),
        &ms,
        &BoundsOptions::default(),
    )
    .unwrap();
    close(r.extrema[0].min, 1147.0118, 1e-2);
    close(r.extrema[0].max, 1645.0538, 1e-2);
    let r = bounds_common_p(
        &tables::margin_f(),
        100,
        &q(1, 3),
        &ms,
        &BoundsOptions::default(),
    )
    .unwrap();
    assert_eq!((r.extrema[0].min, r.extrema[0].max), (2016.0, 2688.0));
}

#[test]
fn min_convex_var_at_two_thirds() {
    let p = q(2, 3);
    let agg = CommonAggregator::new(&tables::margin_f(), 100, 2.0 / 3.0, None).unwrap();
    let s = agg
        .aggregate(&min_convex(100, &p).unwrap().to_f64())
        .unwrap();
    assert_eq!(s.var(0.95), 1961.0);
    let r = bounds_common_p(
        &tables::margin_f(),
        100,
        &p,
        &[MeasureRequest::Var(0.95)],
        &BoundsOptions::default(),
    )
    .unwrap();
    assert_eq!(r.extrema[0].min, 1960.0);
}

#[test]
fn final_example_allocation() {
    let margins = final_discrete();
    let a = Allocation::new(&margins, &tables::example_final_p(), &r1()).unwrap();
    let e1: f64 = a.expected_allocation(0).unwrap().iter().sum();
    close(e1, 150.09995, 1e-6);
    close(margins[0].mean(), 150.09995, 1e-6);
    close(a.sum().std(), 473.23, 5e-3);
    let ces: f64 = (0..3).map(|j| a.ces_alpha(j, 0.95).unwrap()).sum();
    let cstd: f64 = (0..3).map(|j| a.cstd(j).unwrap()).sum();
    close(ces, 1590.08, 5e-2);
    close(cstd, 473.23, 5e-2);
}
