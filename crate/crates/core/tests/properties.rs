use gfgm_core::aggregate::LatticePmf;
use gfgm_core::allocation::Allocation;
use gfgm_core::bernoulli::{
    exchangeable_lift, sum_pmf, validate_membership, BernoulliPmf, MarginVector,
};
use gfgm_core::copula::{copula_cdf, copula_cdf_nu, sample_u, Driver, GfgmSpec};
use gfgm_core::margins::DiscreteMargin;
use gfgm_core::risk::RiskDistribution;
use gfgm_core::scalar::ExactScalar;
use gfgm_core::sum_polytope::{convex_order_leq, extremal_points, max_convex, min_convex, SumPmf};
use gfgm_core::vertex::{decompose, enumerate_vertices, PolytopeSpec};
use gfgm_core::Rational as Q;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn normalize(w: &[u32]) -> Vec<Q> {
    let total: i64 = w.iter().map(|&x| x as i64).sum();
    w.iter().map(|&x| q(x as i64, total)).collect()
}

/// `(d, p)` with `p = a/b`.
fn class() -> impl Strategy<Value = (usize, Q)> {
    (2usize..12, 2i64..7).prop_flat_map(|(d, b)| (Just(d), (1..b).prop_map(move |a| q(a, b))))
}

/// A random member of `D_d(dp)` mixed from up to four extremal points.
fn member() -> impl Strategy<Value = (usize, Q, SumPmf<Q>)> {
    class()
        .prop_flat_map(|(d, p)| {
            let n = extremal_points(d, &p).unwrap().len();
            (
                Just(d),
                Just(p),
                prop::collection::vec((0..n, 1u32..10), 1..5),
            )
        })
        .prop_map(|(d, p, picks)| {
            let pts = extremal_points(d, &p).unwrap();
            let w = normalize(&picks.iter().map(|&(_, w)| w).collect::<Vec<_>>());
            let pmfs: Vec<SumPmf<Q>> = picks.iter().map(|&(i, _)| pts[i].pmf(d)).collect();
            let parts: Vec<(Q, &SumPmf<Q>)> = w.into_iter().zip(&pmfs).collect();
            (d, p, SumPmf::mixture(&parts).unwrap())
        })
}

fn three_p() -> MarginVector<Q> {
    MarginVector::new(vec![q(1, 2), q(1, 3), q(2, 3)]).unwrap()
}

/// A random member of `B_3(1/2, 1/3, 2/3)`.
fn vertex_mixture() -> impl Strategy<Value = BernoulliPmf<Q>> {
    prop::collection::vec(0u32..6, 12)
        .prop_filter("some weight", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| {
            let verts = enumerate_vertices(&PolytopeSpec::new(three_p())).unwrap();
            let w = normalize(&w);
            let values = (0..8)
                .map(|i| {
                    verts
                        .iter()
                        .zip(&w)
                        .fold(q(0, 1), |a, (v, wk)| a + v.value(i).clone() * wk.clone())
                })
                .collect();
            BernoulliPmf::new(3, values).unwrap()
        })
}

fn small_margin() -> impl Strategy<Value = DiscreteMargin<f64>> {
    prop::collection::vec(1u32..20, 2..8).prop_map(|w| {
        let t: u32 = w.iter().sum();
        DiscreteMargin::new(w.iter().map(|&x| x as f64 / t as f64).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn members_sit_between_the_convex_extremes((d, p, g) in member()) {
        prop_assert_eq!(g.mean(), q(d as i64, 1) * p.clone());
        prop_assert!(convex_order_leq(&min_convex(d, &p).unwrap(), &g));
        prop_assert!(convex_order_leq(&g, &max_convex(d, &p).unwrap()));
        prop_assert!(convex_order_leq(&g, &g));
    }

    #[test]
    fn lift_keeps_the_sum((d, p, g) in member()) {
        let f = exchangeable_lift(&g).unwrap();
        prop_assert!(f.is_exchangeable());
        prop_assert!(validate_membership(&f, &MarginVector::common(d, p).unwrap()).unwrap());
        prop_assert_eq!(sum_pmf(&f), g);
    }

    #[test]
    fn lattice_measures_are_ordered((_d, _p, g) in member(), alpha in 0.05f64..0.95, gamma in 0.01f64..2.0) {
        let s = LatticePmf::new(1.0, g.to_f64());
        prop_assert!(s.es(alpha) >= s.var(alpha) - 1e-12);
        prop_assert!(s.es((alpha + 1.0) / 2.0) >= s.es(alpha) - 1e-12);
        prop_assert!(s.es(alpha) <= s.es_integral(alpha) + 1e-9 && s.es(alpha) >= s.es_integral(alpha) - 1e-9);
        let psi = s.entropic(gamma).unwrap();
        prop_assert!(psi >= s.mean() - 1e-12);
        prop_assert!(s.entropic(2.0 * gamma).unwrap() >= psi - 1e-12);
    }

    #[test]
    fn vertex_mixtures_decompose(f in vertex_mixture()) {
        let p = three_p();
        prop_assert!(validate_membership(&f, &p).unwrap());
        let verts = enumerate_vertices(&PolytopeSpec::new(p)).unwrap();
        let w = decompose(&f, &verts).unwrap();
        prop_assert_eq!(w.iter().fold(q(0, 1), |a, b| a + b.clone()), q(1, 1));
        for i in 0..8 {
            let back = verts.iter().zip(&w).fold(q(0, 1), |a, (v, wk)| a + v.value(i).clone() * wk.clone());
            prop_assert_eq!(&back, f.value(i));
        }
    }

    #[test]
    fn copula_forms_agree(f in vertex_mixture(), u in prop::collection::vec(0.0f64..=1.0, 3)) {
        let spec = GfgmSpec::new(three_p(), Driver::Dense(f)).unwrap();
        let a: f64 = copula_cdf(&spec, &u).unwrap();
        let b: f64 = copula_cdf_nu(&spec, &u).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        prop_assert!(a <= u.iter().copied().fold(1.0, f64::min) + 1e-12);
    }

    #[test]
    fn allocation_adds_up(f in vertex_mixture(), margins in prop::collection::vec(small_margin(), 3)) {
        let a = Allocation::new(&margins, &three_p(), &f).unwrap();
        let s = a.sum();
        for y in 0..s.pmf.len() {
            let tot: f64 = (0..3).map(|j| a.expected_allocation(j).unwrap()[y]).sum();
            prop_assert!((tot - y as f64 * s.pmf[y]).abs() < 1e-12);
        }
        for (j, m) in margins.iter().enumerate() {
            let mean: f64 = a.expected_allocation(j).unwrap().iter().sum();
            prop_assert!((mean - m.mean()).abs() < 1e-10);
        }
        let ces: f64 = (0..3).map(|j| a.ces_alpha(j, 0.9).unwrap()).sum();
        let cstd: f64 = (0..3).map(|j| a.cstd(j).unwrap()).sum();
        prop_assert!((ces - s.es(0.9)).abs() < 1e-8);
        prop_assert!((cstd - s.std()).abs() < 1e-8);
    }

    #[test]
    fn sampler_is_seeded(f in vertex_mixture(), seed in any::<u64>()) {
        let spec = GfgmSpec::new(three_p(), Driver::Dense(f)).unwrap();
        let a = sample_u(&spec, 200, seed).unwrap();
        prop_assert_eq!(&a, &sample_u(&spec, 200, seed).unwrap());
        prop_assert_ne!(&a, &sample_u(&spec, 200, seed ^ 1).unwrap());
        prop_assert!((0..200).all(|i| a.row(i).iter().all(|&x| (0.0..=1.0).contains(&x))));
    }
}
