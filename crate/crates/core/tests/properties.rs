use gaudin_core::gaudin::{casimirs, family_f, GaudinModel, GaudinSpec};
use gaudin_core::golden::sl2_example;
use gaudin_core::liealg::{self, LieAlgebra};
use gaudin_core::poisson::{compatibility, PencilDirection};
use gaudin_core::polyring::Poly;
use gaudin_core::rat::{frac, q, Q};
use gaudin_core::verify::{admissibility, involutivity, sample_point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn catalog() -> Vec<LieAlgebra> {
    LieAlgebra::catalog_names()
        .iter()
        .map(|n| LieAlgebra::catalog(n).unwrap())
        .collect()
}

fn product(g: LieAlgebra, n: usize) -> GaudinModel {
    GaudinModel::product(&GaudinSpec::with_default_weights(g, n).unwrap()).unwrap()
}

fn directions() -> [PencilDirection; 3] {
    [
        PencilDirection::affine(frac(-3, 2)),
        PencilDirection::affine(frac(17, 3)),
        PencilDirection::new(q(2), q(5)).unwrap(),
    ]
}

#[test]
fn pencil_generators_pass_the_jacobiator_oracle() {
    for g in catalog() {
        for n in 1..=3 {
            let model = product(g.clone(), n);
            let pen = model.pencil();
            assert!(pen.eta1.jacobiator_oracle().is_zero(), "{} N={n}", g.name());
            assert!(pen.eta2.jacobiator_oracle().is_zero(), "{} N={n}", g.name());
            assert!(compatibility(&pen.eta1, &pen.eta2).unwrap().pass);
        }
    }
}

#[test]
fn moment_maps_are_poisson_maps_for_every_pencil_member() {
    let mut models: Vec<(GaudinModel, Q)> = catalog().into_iter().map(|g| (product(g, 2), q(1))).collect();
    // The canonical map is anti-Poisson.
    models.push((GaudinModel::sl2_canonical(vec![q(0), q(1), q(2)]).unwrap(), q(-1)));
    for (model, sign) in &models {
        let g = model.algebra();
        let n = g.dim();
        let lp = gaudin_core::Bivector::lie_poisson(g);
        for t in directions() {
            let eta = model.pencil().at(&t);
            let mu = model.moment_map(&t).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    let want = lp.get(i, j).compose(&mu).unwrap().scale(sign);
                    assert_eq!(
                        eta.bracket(&mu[i], &mu[j]).unwrap(),
                        want,
                        "{} at {}",
                        g.name(),
                        t.label()
                    );
                }
            }
            for f in model.casimirs().generators() {
                let pulled = f.compose(&mu).unwrap();
                for (i, m) in mu.iter().enumerate() {
                    assert!(
                        eta.bracket(&pulled, m).unwrap().is_zero(),
                        "{} at {}: z{i}",
                        g.name(),
                        t.label()
                    );
                }
            }
        }
    }
}

#[test]
fn pulled_back_casimir_is_not_a_casimir_of_the_pencil_member() {
    let model = product(liealg::sl2(), 2);
    let t = directions()[0].clone();
    let pulled = model.casimirs().generators()[0]
        .compose(&model.moment_map(&t).unwrap())
        .unwrap();
    let eta = model.pencil().at(&t);
    let nonzero = (0..6)
        .filter(|&i| !eta.bracket(&pulled, &Poly::var(6, i)).unwrap().is_zero())
        .count();
    assert!(nonzero > 0);
}

#[test]
fn family_f_is_involutive_for_every_pencil_member() {
    for g in catalog() {
        for n in 1..=3 {
            let model = product(g.clone(), n);
            let f = family_f(&model).unwrap();
            let pen = model.pencil();
            assert!(involutivity(&pen.eta1, &f).unwrap().passed(), "{} N={n} eta1", g.name());
            assert!(involutivity(&pen.eta2, &f).unwrap().passed(), "{} N={n} eta2", g.name());
            for t in directions() {
                assert!(
                    involutivity(&pen.at(&t), &f).unwrap().passed(),
                    "{} N={n} {}",
                    g.name(),
                    t.label()
                );
            }
        }
    }
}

#[test]
fn moment_map_bracket_relations() {
    let t = PencilDirection::new(q(1), q(0)).unwrap();
    // Product model: mu_(1,0) is a Poisson map, {z1, z2} = 2 z2 on sl2*.
    let model = product(liealg::sl2(), 3);
    let mu = model.moment_map(&t).unwrap();
    let b = model.pencil().eta1.bracket(&mu[0], &mu[1]).unwrap();
    assert_eq!(b, mu[1].scale(&q(2)));
    // Canonical model: the map reverses the sign.
    let model = GaudinModel::sl2_canonical(vec![q(0), q(1), q(2)]).unwrap();
    let mu = model.moment_map(&t).unwrap();
    let eta = &model.pencil().eta1;
    assert_eq!(eta.bracket(&mu[0], &mu[1]).unwrap(), mu[1].scale(&q(-2)));
    assert_eq!(eta.bracket(&mu[0], &mu[2]).unwrap(), mu[2].scale(&q(2)));
    assert_eq!(eta.bracket(&mu[1], &mu[2]).unwrap(), mu[0].neg());
}

#[test]
fn canonical_first_order_generators_have_one_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=4usize {
        let model = GaudinModel::sl2_canonical((0..n as i64).map(q).collect()).unwrap();
        let f = family_f(&model).unwrap();
        assert_eq!(f.len(), n - 1);
        let x = sample_point(&model, &mut rng).unwrap();
        let tangent: Vec<Vec<Q>> = (0..model.ambient()).map(|i| liealg::unit(model.ambient(), i)).collect();
        assert_eq!(gaudin_core::verify::independence(&f, &tangent, &x).unwrap(), n - 1);
    }
}

#[test]
fn admissibility_at_generic_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for g in [liealg::sl2(), liealg::so3(), liealg::sl3()] {
        for n in 2..=3 {
            let model = product(g.clone(), n);
            for _ in 0..5 {
                let x = sample_point(&model, &mut rng).unwrap();
                let c = admissibility(&model, &x, &mut rng).unwrap();
                assert!(c.passed(), "{} N={n}: {}", g.name(), c.witnesses);
            }
        }
    }
}

#[test]
fn catalog_casimirs_certify() {
    for g in catalog() {
        let c = casimirs(&g).unwrap();
        assert_eq!(
            c.generators().len(),
            g.algebra_rank(None, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn golden_checks_hold_for_random_weights(
        raw in proptest::collection::btree_set(-20i64..20, 2..=4),
        z in proptest::collection::vec(-5i64..=5, 3),
        den in 1i64..4,
    ) {
        let weights: Vec<Q> = raw.iter().map(|&a| frac(a, den)).collect();
        prop_assume!(z.iter().any(|&v| v != 0));
        let z0: Vec<Q> = z.iter().map(|&v| q(v)).collect();
        let r = sl2_example(&weights, &z0, &[], &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        prop_assert!(r.pass, "{:?}", r.checks);
    }
}
