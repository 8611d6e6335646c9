//! Parameters, presentations and central elements of the Sklyanin algebra
//! `Q` and its twist `Q̃`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ncalg::{NcTensor, QuadAlgebra};
use crate::scalars::{sqrt_adjoin, FieldElem, Rat, ScalarError, TowerField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SklyaninError {
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Parameters `(α, β, γ)` with `α + β + γ + αβγ = 0`, together with a tower
/// holding `i, a, b, c` with `i² = -1, a² = α, b² = β, c² = γ`.
#[derive(Clone, Debug)]
pub struct Params {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    pub tower: TowerField,
    pub i: FieldElem,
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
}

/// `μ = (1-γ)/(1+α)`, `ν = (1+γ)/(1-β)`, `λ = (ν - μν)/(ν - μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub mu: Rat,
    pub nu: Rat,
    pub lambda: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralElement {
    Omega,
    OmegaPrime,
    Theta,
    ThetaPrime,
}

/// Sign patterns of the Klein four-group on coordinates: `γ_1, γ_2, γ_3`
/// negate the coordinate pairs {2,3}, {1,3}, {1,2}.
pub const GAMMA_SIGNS: [[i64; 4]; 4] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];

fn violation(msg: impl Into<String>) -> SklyaninError {
    SklyaninError::ConstraintViolation(msg.into())
}

pub fn make_params(alpha: Rat, beta: Rat) -> Result<Params, SklyaninError> {
    let denom = &Rat::one() + &(&alpha * &beta);
    if denom.is_zero() {
        return Err(violation("1 + alpha*beta = 0"));
    }
    let gamma = -(&(&alpha + &beta) / &denom);
    let excluded = [Rat::zero(), Rat::one(), Rat::from_int(-1)];
    for (name, v) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
        if excluded.contains(v) {
            return Err(violation(format!("{name} = {v} lies in {{0, 1, -1}}")));
        }
    }
    let q = TowerField::rationals();
    let (t, i) = sqrt_adjoin(&q, &q.from_int(-1), "i")?;
    let (t, a) = sqrt_adjoin(&t, &t.from_rat(alpha.clone()), "a")?;
    let (t, b) = sqrt_adjoin(&t, &t.from_rat(beta.clone()), "b")?;
    let (t, c) = sqrt_adjoin(&t, &t.from_rat(gamma.clone()), "c")?;
    let (i, a, b) = (i.embed(&t), a.embed(&t), b.embed(&t));
    Ok(Params {
        alpha,
        beta,
        gamma,
        tower: t,
        i,
        a,
        b,
        c,
    })
}

impl Params {
    /// The preset `(α, β) = (2, 3)`, `γ = -5/7`.
    pub fn defaults() -> Params {
        make_params(Rat::from_int(2), Rat::from_int(3)).expect("default parameters are valid")
    }

    /// `(α_1, α_2, α_3) = (α, β, γ)`.
    pub fn alphas(&self) -> [Rat; 3] {
        [self.alpha.clone(), self.beta.clone(), self.gamma.clone()]
    }

    pub fn constraint_holds(&self) -> bool {
        let s = &(&(&self.alpha + &self.beta) + &self.gamma) + &(&(&self.alpha * &self.beta) * &self.gamma);
        s.is_zero()
    }

    /// Square roots `[a, b, c]` of `[α, β, γ]`.
    pub fn roots(&self) -> [FieldElem; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }

    pub fn rat(&self, r: &Rat) -> FieldElem {
        self.tower.from_rat(r.clone())
    }
}

fn rel(q: &TowerField, terms: &[(i64, Rat, [u8; 2])]) -> NcTensor {
    NcTensor::from_terms(4, 2, terms.iter().map(|(s, c, w)| (w.to_vec(), q.from_rat(&Rat::from_int(*s) * c))))
}

fn cyclic(i: usize) -> (u8, u8) {
    match i {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => unreachable!("cyclic index is 1, 2 or 3"),
    }
}

fn labels(prefix: &str) -> Vec<String> {
    (0..4).map(|i| format!("{prefix}{i}")).collect()
}

/// Relations of `Q`: difference relations for i = 1, 2, 3, then sum relations.
pub fn q_relations(p: &Params) -> QuadAlgebra {
    let q = TowerField::rationals();
    let one = Rat::one();
    let al = p.alphas();
    let mut rels = Vec::new();
    for i in 1..=3u8 {
        let (j, k) = cyclic(i as usize);
        let ai = al[i as usize - 1].clone();
        rels.push(rel(
            &q,
            &[(1, one.clone(), [0, i]), (-1, one.clone(), [i, 0]), (-1, ai.clone(), [j, k]), (-1, ai, [k, j])],
        ));
    }
    for i in 1..=3u8 {
        let (j, k) = cyclic(i as usize);
        rels.push(rel(
            &q,
            &[(1, one.clone(), [0, i]), (1, one.clone(), [i, 0]), (-1, one.clone(), [j, k]), (1, one.clone(), [k, j])],
        ));
    }
    QuadAlgebra::new(labels("x"), rels, p.tower.clone()).expect("Sklyanin relations are independent")
}

/// Relations of `Q̃`, in the row order of its multilinearization matrix.
pub fn qtilde_relations(p: &Params) -> QuadAlgebra {
    let q = TowerField::rationals();
    let one = Rat::one();
    let al = p.alphas();
    let mut rels = Vec::new();
    for i in 1..=3u8 {
        let (j, k) = cyclic(i as usize);
        let ai = al[i as usize - 1].clone();
        rels.push(rel(
            &q,
            &[(1, one.clone(), [0, i]), (-1, one.clone(), [i, 0]), (-1, ai.clone(), [j, k]), (1, ai, [k, j])],
        ));
    }
    for i in 1..=3u8 {
        let (j, k) = cyclic(i as usize);
        rels.push(rel(
            &q,
            &[(1, one.clone(), [0, i]), (1, one.clone(), [i, 0]), (-1, one.clone(), [j, k]), (-1, one.clone(), [k, j])],
        ));
    }
    QuadAlgebra::new(labels("y"), rels, p.tower.clone()).expect("twisted relations are independent")
}

/// Coefficients of `x_2²` and `x_3²` in `Ω'`.
pub fn primed_coefficients(p: &Params) -> Result<[Rat; 2], SklyaninError> {
    let d2 = &Rat::one() - &p.beta;
    let d3 = &Rat::one() + &p.gamma;
    if d2.is_zero() || d3.is_zero() {
        return Err(violation("vanishing denominator in the primed central element"));
    }
    Ok([&(&Rat::one() + &p.alpha) / &d2, &(&Rat::one() - &p.alpha) / &d3])
}

fn diagonal_square(coeffs: [Rat; 4]) -> NcTensor {
    let q = TowerField::rationals();
    NcTensor::from_terms(
        4,
        2,
        coeffs.into_iter().enumerate().map(|(j, c)| (vec![j as u8, j as u8], q.from_rat(c))),
    )
}

pub fn central_elements(p: &Params, which: CentralElement) -> Result<NcTensor, SklyaninError> {
    let one = Rat::one();
    Ok(match which {
        CentralElement::Omega => diagonal_square([-&one, one.clone(), one.clone(), one]),
        CentralElement::Theta => diagonal_square([one.clone(), one.clone(), one.clone(), one]),
        CentralElement::OmegaPrime | CentralElement::ThetaPrime => {
            let [c2, c3] = primed_coefficients(p)?;
            diagonal_square([Rat::zero(), one, c2, c3])
        }
    })
}

pub fn derived_constants(p: &Params) -> Result<DerivedConstants, SklyaninError> {
    let one = Rat::one();
    let d_mu = &one + &p.alpha;
    let d_nu = &one - &p.beta;
    if d_mu.is_zero() || d_nu.is_zero() {
        return Err(violation("vanishing denominator in mu or nu"));
    }
    let mu = &(&one - &p.gamma) / &d_mu;
    let nu = &(&one + &p.gamma) / &d_nu;
    let d_la = &nu - &mu;
    if d_la.is_zero() {
        return Err(violation("mu = nu"));
    }
    let lambda = &(&nu - &(&mu * &nu)) / &d_la;
    Ok(DerivedConstants { mu, nu, lambda })
}

/// Images of the generators under `γ_g` (g = 0 is the identity).
pub fn gamma_substitution(g: usize, tower: &TowerField) -> Vec<NcTensor> {
    (0..4)
        .map(|j| NcTensor::generator(4, j, tower).scale(&tower.from_int(GAMMA_SIGNS[g][j])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn default_gamma() {
        let p = Params::defaults();
        assert_eq!(p.gamma, r(-5, 7));
        assert!(p.constraint_holds());
        assert_eq!(p.tower.dim(), 16);
        assert_eq!(&p.c * &p.c, p.tower.from_rat(r(-5, 7)));
        assert_eq!(&p.i * &p.i, p.tower.from_int(-1));
    }

    #[test]
    fn excluded_parameters() {
        assert!(matches!(
            make_params(Rat::from_int(1), Rat::from_int(5)),
            Err(SklyaninError::ConstraintViolation(_))
        ));
        assert!(matches!(
            make_params(Rat::from_int(2), Rat::from_int(-2)),
            Err(SklyaninError::ConstraintViolation(_))
        ));
        assert!(matches!(
            make_params(Rat::from_int(2), r(-1, 2)),
            Err(SklyaninError::ConstraintViolation(_))
        ));
    }

    #[test]
    fn default_constants() {
        let d = derived_constants(&Params::defaults()).unwrap();
        assert_eq!(d.mu, r(4, 7));
        assert_eq!(d.nu, r(-1, 7));
        assert_eq!(d.lambda, r(3, 35));
    }

    #[test]
    fn primed_coefficient_on_second_square() {
        let [c2, _] = primed_coefficients(&Params::defaults()).unwrap();
        assert_eq!(c2, r(-3, 2));
    }

    #[test]
    fn relation_counts() {
        let p = Params::defaults();
        let q = q_relations(&p);
        assert_eq!(q.relations().len(), 6);
        assert!(q.relations().iter().all(|r| r.degree() == 2));
        assert_eq!(q.relation_space(2).unwrap().dim(), 6);
    }

    #[test]
    fn first_row_of_multilinearization() {
        let p = Params::defaults();
        let m = qtilde_relations(&p).multilinearize();
        let q = TowerField::rationals();
        let z = q.zero();
        let one = q.one();
        let a = q.from_rat(p.alpha.clone());
        let row: Vec<Vec<FieldElem>> = (0..4).map(|j| m.form_coeffs(0, j, &q)).collect();
        assert_eq!(row[0], vec![z.clone(), -&one, z.clone(), z.clone()]);
        assert_eq!(row[1], vec![one.clone(), z.clone(), z.clone(), z.clone()]);
        assert_eq!(row[2], vec![z.clone(), z.clone(), z.clone(), a.clone()]);
        assert_eq!(row[3], vec![z.clone(), z.clone(), -&a, z]);
    }

    #[test]
    fn hilbert_functions_through_degree_three() {
        let p = Params::defaults();
        assert_eq!(q_relations(&p).hilbert_dims(3), vec![1, 4, 10, 20]);
        assert_eq!(qtilde_relations(&p).hilbert_dims(3), vec![1, 4, 10, 20]);
        assert_eq!(q_relations(&p).relation_space(3).unwrap().dim(), 44);
    }

    #[test]
    fn central_elements_commute() {
        let p = Params::defaults();
        let q = q_relations(&p);
        let qt = qtilde_relations(&p);
        let om = central_elements(&p, CentralElement::Omega).unwrap();
        let omp = central_elements(&p, CentralElement::OmegaPrime).unwrap();
        let th = central_elements(&p, CentralElement::Theta).unwrap();
        let thp = central_elements(&p, CentralElement::ThetaPrime).unwrap();
        assert!(q.is_central(&om, &[]));
        assert!(q.is_central(&omp, &[]));
        assert!(qt.is_central(&th, &[]));
        assert!(qt.is_central(&thp, &[]));
        assert!(!q.is_central(&q.generator(0), &[]));
        assert!(!qt.is_zero_in_quotient(&th, &[]).unwrap());
    }

    #[test]
    fn antipode_and_klein_group_preserve_twisted_relations() {
        let p = Params::defaults();
        let qt = qtilde_relations(&p);
        let t = TowerField::rationals();
        let minus: Vec<NcTensor> = (0..4).map(|j| qt.generator(j).scale(&t.from_int(-1))).collect();
        assert!(qt.preserves_relations(&minus, true));
        for g in 1..4 {
            assert!(qt.preserves_relations(&gamma_substitution(g, &t), false));
        }
    }

    #[test]
    fn nu_has_two_expressions() {
        let p = Params::defaults();
        let d = derived_constants(&p).unwrap();
        let one = Rat::one();
        let alt = &(&one + &(&p.alpha * &p.gamma)) / &(&one + &p.alpha);
        assert_eq!(d.nu, alt);
    }
}
