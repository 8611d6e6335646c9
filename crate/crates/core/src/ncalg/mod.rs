//! Degree-truncated linear algebra in free algebras: relation spaces,
//! Hilbert functions, centrality, one- and two-sided quotients, quadratic
//! duals and multilinearization.

mod algebra;
mod span;
mod tensor;

pub use algebra::{QuadAlgebra, RelationMatrix};
pub use span::Subspace;
pub use tensor::NcTensor;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("relation spaces start in degree 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("element {0} is not central")]
    NotCentral(usize),
    #[error("relation {0} is not homogeneous of degree 2")]
    NotQuadratic(usize),
    #[error("expected {expected} generators, found {found}")]
    GeneratorMismatch { expected: usize, found: usize },
    #[error("relations are linearly dependent")]
    DependentRelations,
    #[error("linear forms are linearly dependent")]
    DependentForms,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Rat, TowerField};

    fn q() -> TowerField {
        TowerField::rationals()
    }

    #[test]
    fn free_algebra_has_no_relations() {
        let f = QuadAlgebra::free(4, "x");
        assert_eq!(f.hilbert_dims(3), vec![1, 4, 16, 64]);
        assert_eq!(f.relation_space(3).unwrap().dim(), 0);
        assert_eq!(f.multilinearize().rows(), 0);
    }

    #[test]
    fn relation_space_needs_degree_two() {
        let f = QuadAlgebra::free(2, "x");
        assert_eq!(f.relation_space(1).unwrap_err(), NcError::DegreeTooSmall(1));
    }

    #[test]
    fn polynomial_ring_dimensions() {
        let c = QuadAlgebra::commutative(4, "x");
        assert_eq!(c.hilbert_dims(4), vec![1, 4, 10, 20, 35]);
    }

    #[test]
    fn dual_of_polynomial_ring_is_exterior() {
        let c = QuadAlgebra::commutative(4, "x");
        let d = c.koszul_dual();
        assert_eq!(d.hilbert_dims(5), vec![1, 4, 6, 4, 1, 0]);
        assert!(d.same_relations(&QuadAlgebra::exterior(4, "x")));
        assert!(d.koszul_dual().same_relations(&c));
    }

    #[test]
    fn commutator_is_zero_and_generators_not_central_in_free() {
        let c = QuadAlgebra::commutative(3, "x");
        let x0 = c.generator(0);
        let x1 = c.generator(1);
        let comm = x0.tensor(&x1).sub(&x1.tensor(&x0));
        assert!(c.is_zero_in_quotient(&comm, &[]).unwrap());
        assert!(c.is_central(&x0, &[]));
        let f = QuadAlgebra::free(3, "x");
        assert!(!f.is_central(&f.generator(0), &[]));
        assert!(f.is_zero_in_quotient(&NcTensor::zero(3, 2), &[]).unwrap());
    }

    #[test]
    fn quotient_degree_checks() {
        let c = QuadAlgebra::commutative(2, "x");
        let x0 = c.generator(0);
        let big = x0.tensor(&x0).tensor(&x0);
        assert!(matches!(
            c.is_zero_in_quotient(&x0, &[big]),
            Err(NcError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn line_in_polynomial_ring() {
        // k[x0..x3] / (x2, x3) is k[x0, x1].
        let c = QuadAlgebra::commutative(4, "x");
        let dims = c.left_quotient_dims(&[c.generator(2), c.generator(3)], 4).unwrap();
        assert_eq!(dims, vec![1, 2, 3, 4, 5]);
        let dep = c.left_quotient_dims(&[c.generator(2), c.generator(2)], 2);
        assert_eq!(dep.unwrap_err(), NcError::DependentForms);
    }

    #[test]
    fn two_sided_quotient_by_central_square() {
        let c = QuadAlgebra::commutative(2, "x");
        let x0 = c.generator(0);
        let sq = x0.tensor(&x0);
        assert_eq!(c.two_sided_quotient_dims(&[sq], 4).unwrap(), vec![1, 2, 2, 2, 2]);
        let f = QuadAlgebra::free(2, "x");
        let y = f.generator(0).tensor(&f.generator(1));
        assert_eq!(f.two_sided_quotient_dims(&[y], 3).unwrap_err(), NcError::NotCentral(0));
    }

    #[test]
    fn dependent_relations_are_rejected() {
        let r = NcTensor::monomial(2, &[0, 1], q().one());
        let r2 = r.scale(&q().from_rat(Rat::new(3, 2)));
        let err = QuadAlgebra::new(vec!["a".into(), "b".into()], vec![r, r2], q()).unwrap_err();
        assert_eq!(err, NcError::DependentRelations);
    }

    #[test]
    fn multilinearization_of_commutator() {
        let c = QuadAlgebra::commutative(2, "x");
        let m = c.multilinearize();
        let u = [q().from_int(2), q().from_int(3)];
        let mu = m.eval(&u);
        let k = mu.kernel();
        assert_eq!(k.len(), 1);
        assert!(crate::linalg::proportional(&k[0], &u));
    }
}
