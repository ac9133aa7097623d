use nalgebra::DMatrix;

use super::*;
use crate::linalg::{from_real_diagonal, identity, unit};
use crate::random::Sampler;
use crate::spectral::spectral_resolution;

type M = ComplexMatrix<f64>;
type C = Complex<f64>;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn i() -> C {
    c(0.0, 1.0)
}

/// Random element of a random component in `p × q`.
fn random_element(s: &mut Sampler, p: usize, q: usize) -> (M, Vec<f64>, Vec<usize>) {
    let m = p.min(q);
    let n = 1 + s.index(m.min(3));
    let ranks = s.ranks(n, m);
    let values: Vec<f64> = s.singular_spectrum(n);
    let spec: Vec<(f64, usize)> = values.iter().copied().zip(ranks.iter().copied()).collect();
    (s.rectangular_element(p, q, &spec), values, ranks)
}

fn shape(s: &mut Sampler) -> (usize, usize) {
    (1 + s.index(5), 1 + s.index(5))
}

#[test]
fn diagonal_example() {
    let a = from_real_diagonal(&[3.0, 1.0]);
    let r = jb_spectral(&a, &tol()).unwrap();
    assert_eq!(r.ranks, vec![1, 1]);
    assert!((r.values[0] - 1.0).abs() < 1e-14 && (r.values[1] - 3.0).abs() < 1e-14);
    assert!((&r.tripotents[0] - unit::<f64>(2, 2, 1, 1)).norm() < 1e-14);
    assert!((&r.tripotents[1] - unit::<f64>(2, 2, 0, 0)).norm() < 1e-14);
    let sig = jb_signature(&a, &tol()).unwrap();
    assert_eq!(sig.ranks, vec![1, 1]);
    assert_eq!(
        sig.lambda.iter().map(|l| l.re.round()).collect::<Vec<_>>(),
        vec![1.0, 3.0]
    );
}

#[test]
fn multiple_of_partial_isometry() {
    let mut s = Sampler::new(1);
    let e: M = s.partial_isometry(3, 5, 2);
    let r = jb_spectral(&(&e * c(1.7, 0.0)), &tol()).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r.ranks, vec![2]);
    assert!((r.values[0] - 1.7).abs() < 1e-13);
    assert!((&r.tripotents[0] - &e).norm() < 1e-12);
}

#[test]
fn zero_and_nonfinite_rejected() {
    assert_eq!(
        jb_spectral(&M::zeros(2, 3), &tol()),
        Err(Error::ZeroElement)
    );
    assert_eq!(
        jb_spectral(&M::zeros(0, 3), &tol()),
        Err(Error::ZeroElement)
    );
    let mut a = M::zeros(2, 2);
    a[(0, 1)] = c(f64::NAN, 0.0);
    assert_eq!(jb_spectral(&a, &tol()), Err(Error::NonFinite));
}

#[test]
fn random_rectangular_roundtrip_and_orthogonality() {
    let mut s = Sampler::new(2);
    for _ in 0..150 {
        let (p, q) = shape(&mut s);
        let a: M = s.ginibre(p, q);
        let r = jb_spectral(&a, &tol()).unwrap();
        assert!((r.reconstruct() - &a).norm() <= 1e-9);
        for w in r.values.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(r.values[0] > 0.0);
        for (j, ej) in r.tripotents.iter().enumerate() {
            assert!(crate::triple::tripotent_residual(ej) < 1e-12);
            for ek in r.tripotents.iter().skip(j + 1) {
                assert!(box_op(ej, ek).unwrap().kernel().norm() <= 1e-9);
            }
        }
        assert!(r.orthogonality_residual() <= 1e-9);
    }
}

#[test]
fn values_match_gram_eigenvalues() {
    let mut s = Sampler::new(3);
    for _ in 0..50 {
        let (p, q) = shape(&mut s);
        let a: M = s.ginibre(p, q);
        let r = jb_spectral(&a, &tol()).unwrap();
        let mut gram: Vec<f64> = (a.adjoint() * &a)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .filter(|&&x| x > 1e-12)
            .map(|x| x.sqrt())
            .collect();
        gram.sort_by(|x, y| x.total_cmp(y));
        assert_eq!(gram.len(), r.len());
        for (x, y) in gram.iter().zip(&r.values) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn prescribed_components_are_recovered() {
    let mut s = Sampler::new(4);
    for _ in 0..100 {
        let (p, q) = shape(&mut s);
        let (a, values, ranks) = random_element(&mut s, p, q);
        let r = jb_spectral(&a, &tol()).unwrap();
        assert_eq!(r.ranks, ranks);
        for (x, y) in r.values.iter().zip(&values) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn agrees_with_spectral_resolution_on_positive_normal_elements() {
    let mut s = Sampler::new(5);
    for _ in 0..50 {
        let dim = 2 + s.index(3);
        let n = 1 + s.index(dim);
        let ranks = s.ranks(n, dim);
        let values: Vec<f64> = s.singular_spectrum(n);
        let spec: Vec<(C, usize)> = values.iter().map(|&l| c(l, 0.0)).zip(ranks).collect();
        let a: M = s.normal_element(dim, &spec);
        let jr = jb_spectral(&a, &tol()).unwrap();
        let sr = spectral_resolution(&a, &tol()).unwrap();
        assert_eq!(jr.len(), sr.len());
        for (k, l) in jr.values.iter().enumerate() {
            let j = sr
                .values
                .iter()
                .position(|m| (m.re - l).abs() < 1e-9)
                .unwrap();
            assert!((&jr.tripotents[k] - &sr.projections[j]).norm() <= 1e-9);
            assert_eq!(jr.ranks[k], sr.ranks[j]);
        }
    }
}

#[test]
fn odd_powers() {
    let mut s = Sampler::new(6);
    let e: M = s.partial_isometry(3, 4, 2);
    let a = &e * c(2.0, 0.0);
    assert!((odd_power(&a, 1) - &e * c(8.0, 0.0)).norm() < 1e-13);
    assert!((triple_product(&a, &a, &a).unwrap() - &e * c(8.0, 0.0)).norm() < 1e-13);
    for _ in 0..100 {
        let (p, q) = shape(&mut s);
        let a: M = s.ginibre(p, q);
        let r = jb_spectral(&a, &tol()).unwrap();
        assert_eq!(
            odd_power_residual(&a, &r, 0).unwrap(),
            (r.reconstruct() - &a).norm() / r.values.last().unwrap().max(1.0)
        );
        for l in 0..=3 {
            assert!(odd_power_residual(&a, &r, l).unwrap() <= 1e-8);
            assert!(odd_power_check(&r, l) <= 1e-8);
        }
    }
}

#[test]
fn signature_is_invariant_under_unitary_equivalence() {
    let mut s = Sampler::new(7);
    for _ in 0..50 {
        let (p, q) = shape(&mut s);
        let (a, _, _) = random_element(&mut s, p, q);
        let v: M = s.haar_unitary(p);
        let u: M = s.haar_unitary(q);
        let b = &v * &a * &u;
        let sa = jb_signature(&a, &tol()).unwrap();
        let sb = jb_signature(&b, &tol()).unwrap();
        assert!(sa.matches(&sb, 1e-8));
        assert!(jb_same_component(&a, &b, &tol()).unwrap());
    }
}

#[test]
fn connect_examples() {
    let a = unit::<f64>(2, 2, 0, 0);
    let b = unit::<f64>(2, 2, 1, 1);
    let (u, v) = connect_type1(&a, &b, &tol()).unwrap();
    assert!(connect_residual(&a, &b, &u, &v) < 1e-14);
    assert!((v.adjoint() * &v - identity::<f64>(2)).norm() < 1e-14);
    assert!((u.adjoint() * &u - identity::<f64>(2)).norm() < 1e-14);

    let (u, v) = connect_type1(&a, &a, &tol()).unwrap();
    assert!(connect_residual(&a, &a, &u, &v) < 1e-14);

    assert_eq!(
        connect_type1(&a, &(&b * c(2.0, 0.0)), &tol()),
        Err(Error::DifferentComponents)
    );
    assert!(matches!(
        connect_type1(&a, &M::zeros(2, 3), &tol()),
        Err(Error::ShapeMismatch { .. })
    ));
}

#[test]
fn connect_random_pairs() {
    let mut s = Sampler::new(8);
    for _ in 0..100 {
        let (p, q) = shape(&mut s);
        let (a, values, ranks) = random_element(&mut s, p, q);
        let spec: Vec<(f64, usize)> = values.into_iter().zip(ranks).collect();
        let b: M = s.rectangular_element(p, q, &spec);
        let (u, v) = connect_type1(&a, &b, &tol()).unwrap();
        assert!(connect_residual(&a, &b, &u, &v) <= 1e-9);
        assert!((v.adjoint() * &v - identity::<f64>(p)).norm() < 1e-12);
        assert!((u.adjoint() * &u - identity::<f64>(q)).norm() < 1e-12);
    }
}

#[test]
fn extended_tangent_example() {
    let a = unit::<f64>(2, 2, 0, 0) * c(2.0, 0.0);
    let b = extended_tangent_basis(&a, &tol()).unwrap();
    assert_eq!(b.fiber.len(), 1);
    assert_eq!(b.fiber[0].len(), 1);
    assert!((&b.fiber[0][0] - unit::<f64>(2, 2, 0, 0) * i()).norm() < 1e-14);
    assert_eq!(b.half.len(), 4);
    assert_eq!(b.dim(), 5);
    for w in &b.half {
        assert!(w[(0, 0)].norm() < 1e-14 && w[(1, 1)].norm() < 1e-14);
    }
    assert!(b.contains(
        &(unit::<f64>(2, 2, 0, 1) + unit::<f64>(2, 2, 0, 0) * c(0.0, 3.0)),
        &tol()
    ));
    assert!(!b.contains(&unit::<f64>(2, 2, 0, 0), &tol()));
    assert!(!b.contains(&unit::<f64>(2, 2, 1, 1), &tol()));
}

#[test]
fn minimal_tripotent_has_one_dimensional_fiber() {
    let mut s = Sampler::new(9);
    let e: M = s.partial_isometry(3, 4, 1);
    let b = extended_tangent_basis(&e, &tol()).unwrap();
    assert_eq!(b.fiber[0].len(), 1);
    let w = &b.fiber[0][0];
    let ratio = w
        .iter()
        .zip(e.iter())
        .find(|(_, y)| y.norm() > 0.1)
        .map(|(x, y)| x / y)
        .unwrap();
    assert!((w - &e * ratio).norm() < 1e-13);
    assert!((ratio.norm() - 1.0).abs() < 1e-13 && ratio.re.abs() < 1e-13);
}

/// Real dimension of the span of `{X a + a Y}`, `X`, `Y` skew-hermitian: the tangent space of the orbit.
fn orbit_tangent(a: &M) -> Vec<M> {
    let (p, q) = a.shape();
    let mut out = Vec::new();
    let skew = |n: usize| {
        let mut v = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let e = unit::<f64>(n, n, j, k);
                if j == k {
                    v.push(&e * i());
                } else if j < k {
                    v.push(&e - e.adjoint());
                    v.push((&e + e.adjoint()) * i());
                }
            }
        }
        v
    };
    for x in skew(p) {
        out.push(x * a);
    }
    for y in skew(q) {
        out.push(a * y);
    }
    out
}

fn real_rank(vs: &[M]) -> usize {
    let n = vs.first().map_or(0, |v| v.len());
    let cols: Vec<nalgebra::DVector<f64>> = vs
        .iter()
        .map(|v| nalgebra::DVector::from_iterator(2 * n, v.iter().flat_map(|z| [z.re, z.im])))
        .collect();
    let m = DMatrix::from_columns(&cols);
    let gram = m.transpose() * &m;
    gram.symmetric_eigen()
        .eigenvalues
        .iter()
        .filter(|&&x| x > 1e-9)
        .count()
}

/// The orbit `{V a U}` is the component. Its tangent space contains the extended tangent space and
/// exceeds it by exactly the cross spaces `Z_{j,k}`, `j ≠ k`, of real dimension `4 r_j r_k`.
#[test]
fn extended_tangent_space_inside_orbit_tangent_space() {
    let mut s = Sampler::new(10);
    let mut coupled = 0;
    for _ in 0..40 {
        let (p, q) = shape(&mut s);
        let (a, _, ranks) = random_element(&mut s, p, q);
        let b = extended_tangent_basis(&a, &tol()).unwrap();
        let rho: usize = ranks.iter().sum();
        let expected =
            ranks.iter().map(|r| r * r).sum::<usize>() + 2 * (rho * (p - rho) + rho * (q - rho));
        assert_eq!(b.dim(), expected);
        let vs: Vec<M> = b.vectors().cloned().collect();
        for (x, y) in vs.iter().enumerate() {
            for (z, w) in vs.iter().enumerate() {
                let g = crate::linalg::inner(y, w).re;
                assert!((g - if x == z { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let orbit = orbit_tangent(&a);
        let orbit_dim = real_rank(&orbit);
        let mut joint = orbit.clone();
        joint.extend(vs.iter().cloned());
        assert_eq!(real_rank(&joint), orbit_dim);

        let mut cross = 0;
        for j in 0..ranks.len() {
            for k in j + 1..ranks.len() {
                cross += 4 * ranks[j] * ranks[k];
            }
        }
        assert_eq!(orbit_dim, b.dim() + cross);
        coupled += (cross > 0) as usize;

        let family: Vec<Tripotent<f64>> = b
            .resolution()
            .tripotents
            .iter()
            .map(|e| Tripotent::new(e.clone(), &tol()).unwrap())
            .collect();
        let jp = joint_peirce(&family, &tol()).unwrap();
        for t in &orbit {
            let mut rest = t.clone();
            for j in 1..=family.len() {
                for k in j + 1..=family.len() {
                    rest -= jp.projection(j, k).unwrap().apply(t).unwrap();
                }
            }
            assert!(b.contains(&rest, &tol()));
        }
    }
    assert!(coupled > 5);
}

#[test]
fn extended_tangent_split_roundtrip() {
    let mut s = Sampler::new(11);
    for _ in 0..30 {
        let (p, q) = shape(&mut s);
        let (a, _, _) = random_element(&mut s, p, q);
        let b = extended_tangent_basis(&a, &tol()).unwrap();
        let z = b
            .vectors()
            .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
        let split = ExtendedTangent::split(b.resolution(), &z, &tol()).unwrap();
        assert!((split.vector() - &z).norm() < 1e-12);
        for (k, v) in split.ia_part.iter().enumerate() {
            assert!((sharp(&b.resolution().tripotents[k], v) - v).norm() < 1e-12);
        }
        let bad = &z + s.ginibre::<f64>(p, q);
        if extended_tangent_residual(b.resolution(), &bad) > 1e-6 {
            assert!(matches!(
                ExtendedTangent::split(b.resolution(), &bad, &tol()),
                Err(Error::NotTangent { .. })
            ));
        }
    }
}

#[test]
fn chart_ext_examples() {
    let mut s = Sampler::new(12);
    let (a, _, _) = random_element(&mut s, 3, 4);
    assert!((chart_ext(&a, &M::zeros(3, 4), &tol()).unwrap() - &a).norm() < 1e-14);
    assert!(matches!(
        chart_ext(&a, &s.ginibre(3, 4), &tol()),
        Err(Error::NotTangent { .. })
    ));

    let e: M = s.partial_isometry(3, 4, 1);
    for theta in [0.3, 1.0, std::f64::consts::PI] {
        let image = chart_ext(&e, &(&e * c(0.0, theta)), &tol()).unwrap();
        assert!((image - &e * C::from_polar(1.0, -2.0 * theta)).norm() < 1e-12);
    }
}

#[test]
fn chart_ext_preserves_signature_and_splits_equivalence() {
    let mut s = Sampler::new(13);
    let mut half_trials = 0;
    for _ in 0..60 {
        let (p, q) = shape(&mut s);
        let (a, _, _) = random_element(&mut s, p, q);
        let b = extended_tangent_basis(&a, &tol()).unwrap();
        let fiber_dir = b
            .fiber
            .iter()
            .flatten()
            .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
        let moved = chart_ext(&a, &fiber_dir, &tol()).unwrap();
        assert!(jb_signature(&moved, &tol())
            .unwrap()
            .matches(&jb_signature(&a, &tol()).unwrap(), 1e-8));
        assert!(equivalent_elements(&a, &moved, &tol()).unwrap());

        if b.half.is_empty() {
            continue;
        }
        half_trials += 1;
        let u = b
            .half
            .iter()
            .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
        let u = &u * c(0.2 / u.norm(), 0.0);
        let moved = chart_ext(&a, &(&u + &fiber_dir), &tol()).unwrap();
        assert!(jb_signature(&moved, &tol())
            .unwrap()
            .matches(&jb_signature(&a, &tol()).unwrap(), 1e-8));
        assert!(!equivalent_elements(&a, &moved, &tol()).unwrap());
    }
    assert!(half_trials > 20);
}

#[test]
fn neher_examples() {
    let mut s = Sampler::new(14);
    let e = Tripotent::new(s.partial_isometry::<f64>(3, 4, 2), &tol()).unwrap();
    let rotated = Tripotent::new(e.matrix() * C::from_polar(1.0, 0.7), &tol()).unwrap();
    assert!(neher_equivalent(&e, &rotated, &tol()).unwrap());
    assert!(neher_equivalent_peirce(&e, &rotated, &tol()).unwrap());
    assert!(neher_equivalent(&e, &e, &tol()).unwrap());
    let e11 = Tripotent::new(unit::<f64>(2, 2, 0, 0), &tol()).unwrap();
    let e22 = Tripotent::new(unit::<f64>(2, 2, 1, 1), &tol()).unwrap();
    assert!(!neher_equivalent(&e11, &e22, &tol()).unwrap());
    assert!(!neher_equivalent_peirce(&e11, &e22, &tol()).unwrap());
}

#[test]
fn neher_formulations_agree() {
    let mut s = Sampler::new(15);
    let mut equivalent = 0;
    for trial in 0..200 {
        let (p, q) = (1 + s.index(4), 1 + s.index(4));
        let r = 1 + s.index(p.min(q));
        let e: M = s.partial_isometry(p, q, r);
        let f: M = match trial % 4 {
            0 => {
                let te = Tripotent::new(e.clone(), &tol()).unwrap();
                let rr = jb_spectral(te.matrix(), &tol()).unwrap();
                let w: M = s.haar_unitary(r);
                rr.from_peirce_one_coordinates(0, &w)
            }
            1 => s.partial_isometry(p, q, r),
            2 => {
                let v: M = s.haar_unitary(p);
                let u: M = s.haar_unitary(q);
                let t = s.uniform(0.0, 0.05);
                let small =
                    |m: M| crate::linalg::mat_exp(&((&m - m.adjoint()) * c(t, 0.0))).unwrap();
                small(v) * &e * small(u)
            }
            _ => &e * C::from_polar(1.0, s.uniform(0.0, 6.3)),
        };
        let te = Tripotent::new(e, &tol()).unwrap();
        let tf = Tripotent::new(f, &tol()).unwrap();
        let by_box = neher_equivalent(&te, &tf, &tol()).unwrap();
        let by_peirce = neher_equivalent_peirce(&te, &tf, &tol()).unwrap();
        assert_eq!(
            by_box,
            by_peirce,
            "trial {trial}: {:?}",
            neher_residuals(&te, &tf).unwrap()
        );
        equivalent += by_box as usize;
    }
    assert!((90..200).contains(&equivalent));
}

#[test]
fn equivalent_elements_examples() {
    let mut s = Sampler::new(16);
    let (a, _, _) = random_element(&mut s, 4, 3);
    assert!(equivalent_elements(&a, &a, &tol()).unwrap());
    let r = jb_spectral(&a, &tol()).unwrap();
    let phased = r
        .values
        .iter()
        .zip(&r.tripotents)
        .fold(M::zeros(4, 3), |acc, (l, e)| {
            acc + e * C::from_polar(*l, s.uniform(0.0, 6.3))
        });
    assert!(equivalent_elements(&a, &phased, &tol()).unwrap());
    assert_eq!(
        equivalent_elements(&a, &(&a * c(2.0, 0.0)), &tol()),
        Err(Error::DifferentComponents)
    );
}

#[test]
fn fiber_at_zero_and_rank_one_circle() {
    let mut s = Sampler::new(17);
    let (a, _, _) = random_element(&mut s, 3, 4);
    let r = jb_spectral(&a, &tol()).unwrap();
    let v = r.tripotents.iter().fold(M::zeros(3, 4), |acc, e| acc + e);
    let f = fiber_sample(&a, &v, 0.0, &tol()).unwrap();
    assert!((&f.point - &a).norm() < 1e-13);
    for (psi, e) in f.factors.iter().zip(&r.tripotents) {
        assert!((psi - e).norm() < 1e-14);
    }

    let e: M = s.partial_isometry(3, 4, 1);
    for t in [-2.0, 0.4, 3.0] {
        let f = fiber_sample(&e, &e, t, &tol()).unwrap();
        let expected = &e * C::from_polar(1.0, -2.0 * t);
        assert!((&f.factors[0] - &expected).norm() < 1e-12);
        assert!((&f.point - &expected).norm() < 1e-12);
    }
}

#[test]
fn fiber_factorizes_over_unit_circles() {
    let mut s = Sampler::new(18);
    for _ in 0..60 {
        let (p, q) = shape(&mut s);
        let (a, _, _) = random_element(&mut s, p, q);
        let r = jb_spectral(&a, &tol()).unwrap();
        let v = (0..r.len()).fold(M::zeros(p, q), |acc, k| {
            let h: M = s.hermitian(r.ranks[k]);
            acc + r.from_peirce_one_coordinates(k, &h)
        });
        let t = s.uniform(-5.0, 5.0);
        let f = fiber_sample(&a, &v, t, &tol()).unwrap();
        assert!(
            f.factorization_residual <= 1e-8,
            "{}",
            f.factorization_residual
        );
        assert!(f.membership_residual <= 1e-10);
        assert!(f.unit_circle_residual <= 1e-10);
        assert!(f.jordan_unit_residual <= 1e-10);
        assert!(equivalent_elements(&a, &f.point, &tol()).unwrap());
    }
}

#[test]
fn fiber_rejects_directions_outside_a() {
    let mut s = Sampler::new(19);
    let (a, _, _) = random_element(&mut s, 3, 3);
    let r = jb_spectral(&a, &tol()).unwrap();
    let skew = &r.tripotents[0] * i();
    assert!(matches!(
        fiber_sample(&a, &skew, 1.0, &tol()),
        Err(Error::NotInA { .. })
    ));
    let g: M = s.ginibre(3, 3);
    assert!(matches!(
        fiber_sample(&a, &g, 1.0, &tol()),
        Err(Error::NotInA { .. })
    ));
}

#[test]
fn base_geodesics() {
    let mut s = Sampler::new(20);
    let mut tested = 0;
    for _ in 0..40 {
        let (p, q) = shape(&mut s);
        let (a, _, _) = random_element(&mut s, p, q);
        let b = extended_tangent_basis(&a, &tol()).unwrap();
        if b.half.is_empty() {
            assert!(matches!(
                base_geodesic(&a, &s.ginibre(p, q), &tol()),
                Err(Error::NotTangent { .. })
            ));
            continue;
        }
        tested += 1;
        let u = b
            .half
            .iter()
            .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
        let g = base_geodesic(&a, &u, &tol()).unwrap();
        assert_eq!(g.point(0.0).unwrap(), a);
        let h = 1e-5;
        let fd = (g.point(h).unwrap() - g.point(-h).unwrap()) / c(2.0 * h, 0.0);
        let s_sup = b.resolution().support();
        let exact =
            triple_product(&s_sup, &u, &a).unwrap() - triple_product(&u, &s_sup, &a).unwrap();
        assert!((fd - &exact).norm() < 1e-8);
        assert!((g.initial_velocity().unwrap() - &exact).norm() < 1e-12);
        for t in [-2.0, -0.5, 1.0, 2.0] {
            assert!(g.residual(t, 1e-4).unwrap() <= 1e-6);
            let sig = jb_signature(&g.point(t).unwrap(), &tol()).unwrap();
            assert!(sig.matches(&b.resolution().signature(), 1e-8));
        }
        let base = b.resolution().base_point();
        let plus = base.chart(&u).unwrap();
        let minus = base.chart(&(-&u)).unwrap();
        assert!((base.symmetry(&plus) - minus).norm() < 1e-10);
    }
    assert!(tested > 20);
}
