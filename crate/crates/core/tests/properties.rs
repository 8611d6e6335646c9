use proptest::prelude::*;

use sklyanin::ncalg::{NcTensor, QuadAlgebra, Subspace};
use sklyanin::scalars::{FieldElem, Rat, TowerField};
use sklyanin::sklyanin::{q_relations, qtilde_relations, Params};
use sklyanin::twist::{cocycle_from_matrix_basis, quaternion_basis, twist_element, CharacterAssignment};

fn defaults() -> &'static Params {
    use std::sync::OnceLock;
    static P: OnceLock<Params> = OnceLock::new();
    P.get_or_init(Params::defaults)
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rat::new(n, d))
}

fn tower_elem() -> impl Strategy<Value = FieldElem> {
    prop::collection::vec(small_rat(), 16).prop_map(|c| defaults().tower.element(&c))
}

fn int_vec(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, n)
}

fn presets() -> Vec<QuadAlgebra> {
    let p = defaults();
    vec![q_relations(p), qtilde_relations(p), QuadAlgebra::commutative(4, "x")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tower_field_axioms(a in tower_elem(), b in tower_elem(), c in tower_elem()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn rationals_print_and_parse(r in small_rat()) {
        prop_assert_eq!(r.to_string().parse::<Rat>().unwrap(), r);
    }

    #[test]
    fn multilinearization_matches_evaluation(u in int_vec(4), v in int_vec(4)) {
        let q = TowerField::rationals();
        let u: Vec<FieldElem> = u.iter().map(|&x| q.from_int(x)).collect();
        let v: Vec<FieldElem> = v.iter().map(|&x| q.from_int(x)).collect();
        for a in presets() {
            let m = a.multilinearize().eval(&u);
            let direct: Vec<FieldElem> = a.relations().iter().map(|r| r.eval_bilinear(&u, &v)).collect();
            prop_assert_eq!(m.apply(&v), direct);
        }
    }

    #[test]
    fn twisting_back_recovers_the_element(c in int_vec(16)) {
        let p = defaults();
        let mu = cocycle_from_matrix_basis(&quaternion_basis(&p.i)).unwrap();
        let chars = CharacterAssignment::sklyanin();
        let z = NcTensor::from_terms(
            4,
            2,
            c.iter().enumerate().map(|(k, &x)| (vec![(k / 4) as u8, (k % 4) as u8], p.tower.from_int(x))),
        );
        let there = twist_element(&z, &chars, &mu).unwrap();
        prop_assert_eq!(twist_element(&there, &chars, &mu.pointwise_inverse()).unwrap(), z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn left_quotients_shrink_as_forms_are_added(a in int_vec(4), b in int_vec(4)) {
        prop_assume!(a.iter().any(|&x| x != 0));
        let q = TowerField::rationals();
        let f = |v: &[i64]| NcTensor::linear(&v.iter().map(|&x| q.from_int(x)).collect::<Vec<_>>());
        let alg = qtilde_relations(defaults());
        let one = alg.left_quotient_dims(&[f(&a)], 3).unwrap();
        let two = alg.left_quotient_dims(&[f(&a), f(&b)], 3).unwrap();
        prop_assert!(one.iter().zip(&two).all(|(x, y)| y <= x), "{:?} vs {:?}", one, two);
    }
}

fn tensor_with_generators(s: &Subspace, gens: usize, degree: usize, left: bool) -> Subspace {
    let t = TowerField::rationals();
    let mut out = Vec::new();
    for row in &s.rows {
        let v = NcTensor::from_sparse(gens, degree, row);
        for i in 0..gens {
            let x = NcTensor::generator(gens, i, &t);
            out.push(if left { x.tensor(&v) } else { v.tensor(&x) }.to_sparse());
        }
    }
    Subspace::from_vectors(out, gens.pow(degree as u32 + 1))
}

#[test]
fn relation_spaces_are_two_sided_and_give_the_hilbert_function() {
    for a in presets() {
        let g = a.gens();
        for n in 2..=4 {
            let rn = a.relation_space(n).unwrap();
            assert_eq!(a.hilbert_dim(n), g.pow(n as u32) - rn.dim());
            if n == 2 {
                continue;
            }
            let prev = a.relation_space(n - 1).unwrap();
            for left in [true, false] {
                assert!(tensor_with_generators(&prev, g, n - 1, left).is_within(&rn));
            }
        }
    }
}

#[test]
fn koszul_numerical_identity() {
    for a in presets() {
        let h = a.hilbert_dims(4);
        let d = a.koszul_dual().hilbert_dims(4);
        for n in 1..=4 {
            let s: i64 = (0..=n)
                .map(|k| if k % 2 == 0 { 1 } else { -1 } * (h[k] * d[n - k]) as i64)
                .sum();
            assert_eq!(s, 0, "degree {n}");
        }
    }
}
