//! Point modules, the action of `Θ` on them, fat points, line modules and
//! the equivariant structure on `M_2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{gamma_act, ProjPoint};
use crate::linalg::Matrix;
use crate::ncalg::{NcError, NcTensor, QuadAlgebra};
use crate::pointscheme::{sigma, FamilyLabel, PointFamily, PointSchemeError};
use crate::scalars::{FieldElem, Rat, TowerField};
use crate::sklyanin::Params;
use crate::twist::quaternion_basis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("p and its translate coincide, so the secant is undefined")]
    DegenerateSecant,
    #[error("no sign pattern yields a line module for xi_{0}")]
    NoValidPattern(usize),
    #[error("the vector must be nonzero")]
    ZeroVector,
    #[error(transparent)]
    PointScheme(#[from] PointSchemeError),
    #[error(transparent)]
    Algebra(#[from] NcError),
}

/// A truncated point module `p_0, ..., p_N` with `r(p_{n+1}, p_n) = 0`.
#[derive(Clone, Debug)]
pub struct PointModuleWitness {
    pub family: FamilyLabel,
    pub row: usize,
    pub sequence: Vec<ProjPoint>,
}

impl PointModuleWitness {
    /// Smallest `k ≥ 1` with `p_k = p_0`, if it occurs.
    pub fn period(&self) -> Option<usize> {
        (1..self.sequence.len()).find(|&k| self.sequence[k] == self.sequence[0])
    }
}

fn pair_vanishes(a: &QuadAlgebra, u: &ProjPoint, v: &ProjPoint) -> bool {
    a.relations().iter().all(|r| r.eval_bilinear(u.coords(), v.coords()).is_zero())
}

/// The sequence `θ^n(u)` for the family point `k`, checked against the relations.
pub fn point_module_witness(
    a: &QuadAlgebra,
    f: &PointFamily,
    k: usize,
    n: usize,
) -> Result<PointModuleWitness, RepError> {
    let fp = &f.points[k];
    let mut seq = vec![fp.point.clone()];
    for _ in 0..n {
        let last = seq.last().unwrap();
        seq.push(crate::pointscheme::theta(f, last)?);
    }
    for w in seq.windows(2) {
        if !pair_vanishes(a, &w[1], &w[0]) {
            return Err(RepError::VerificationFailed(format!("relations do not vanish at ({}, {})", w[1], w[0])));
        }
    }
    Ok(PointModuleWitness {
        family: fp.label,
        row: fp.row,
        sequence: seq,
    })
}

/// `κ = Σ_j u_j θ(u)_j` on the stored representative of family point `k`.
pub fn theta_constant(f: &PointFamily, k: usize) -> FieldElem {
    let u = &f.points[k].point;
    let th = f.theta_at(k);
    u.coords()
        .iter()
        .zip(th.coords())
        .fold(u.tower().zero(), |acc, (a, b)| &acc + &(a * b))
}

/// `1, 4, (β-1)(γ+1), (α+1)(γ-1), (α-1)(β+1)` for the five groups.
pub fn expected_theta_constants(p: &Params) -> [Rat; 5] {
    let one = Rat::one();
    let (al, be, ga) = (&p.alpha, &p.beta, &p.gamma);
    [
        one.clone(),
        Rat::from_int(4),
        &(be - &one) * &(ga + &one),
        &(al + &one) * &(ga - &one),
        &(al - &one) * &(be + &one),
    ]
}

/// Whether the vectors `x_j(p_n) q_j v` span `k²` for `p_n = σ^n(p)`, `n ≤ steps`.
pub fn fat_point_span_check(
    q: &QuadAlgebra,
    params: &Params,
    p: &ProjPoint,
    steps: usize,
    v: &[FieldElem; 2],
) -> Result<bool, RepError> {
    if v.iter().all(FieldElem::is_zero) {
        return Err(RepError::ZeroVector);
    }
    let basis = quaternion_basis(&params.i);
    let mut pn = p.clone();
    for n in 0..=steps {
        let cols: Vec<Vec<FieldElem>> = (0..4)
            .map(|j| {
                basis.mats[j]
                    .apply(v)
                    .iter()
                    .map(|c| c * &pn.coords()[j])
                    .collect()
            })
            .collect();
        if Matrix::from_rows(cols).rank() != 2 {
            return Ok(false);
        }
        if n < steps {
            pn = sigma(q, &pn)?;
        }
    }
    Ok(true)
}

/// Generator pairs `((a, b), (c, d))` of the two forms for the secant through
/// `p` and `γ_i(p)`.
fn secant_pairs(i: usize) -> ((usize, usize), (usize, usize)) {
    match i {
        1 => ((0, 1), (2, 3)),
        2 => ((0, 2), (1, 3)),
        3 => ((0, 3), (1, 2)),
        _ => panic!("secant index must be 1, 2 or 3"),
    }
}

/// Coefficients `[(β_a, β_b), (β_c, β_d)]` of the two forms for the secant
/// through `p` and `γ_i(p)`: `p_b x_a - p_a x_b` and `p_d x_c - p_c x_d`.
fn secant_coeffs(p: &ProjPoint, i: usize) -> Result<[(FieldElem, FieldElem); 2], RepError> {
    let ((a, b), (c, d)) = secant_pairs(i);
    let x = p.coords();
    let first = (x[b].clone(), -&x[a]);
    let second = (x[d].clone(), -&x[c]);
    if (first.0.is_zero() && first.1.is_zero()) || (second.0.is_zero() && second.1.is_zero()) {
        return Err(RepError::DegenerateSecant);
    }
    Ok([first, second])
}

fn form(t: &TowerField, terms: &[(usize, FieldElem)]) -> NcTensor {
    let mut c = vec![t.zero(); 4];
    for (j, v) in terms {
        c[*j] = &c[*j] + v;
    }
    NcTensor::linear(&c)
}

/// The two forms over `Q` cutting out the secant through `p` and `γ_i(p)`.
/// With `flipped`, the second coefficient of each form changes sign, giving
/// the secant through `γ_j(p)` and `γ_k(p)`.
pub fn line_forms_q(p: &ProjPoint, i: usize, flipped: bool) -> Result<[NcTensor; 2], RepError> {
    if *p == gamma_act(i, p) {
        return Err(RepError::DegenerateSecant);
    }
    let [f1, f2] = secant_coeffs(p, i)?;
    let ((a, b), (c, d)) = secant_pairs(i);
    let t = p.tower();
    let s = |x: &FieldElem| if flipped { -x } else { x.clone() };
    Ok([
        form(t, &[(a, f1.0.clone()), (b, s(&f1.1))]),
        form(t, &[(c, f2.0.clone()), (d, s(&f2.1))]),
    ])
}

/// One of `1, -1, i, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit4 {
    One,
    MinusOne,
    I,
    MinusI,
}

impl Unit4 {
    pub const SEARCH_ORDER: [Unit4; 4] = [Unit4::I, Unit4::MinusI, Unit4::One, Unit4::MinusOne];

    pub fn value(self, i: &FieldElem) -> FieldElem {
        let t = i.tower();
        match self {
            Unit4::One => t.one(),
            Unit4::MinusOne => t.from_int(-1),
            Unit4::I => i.clone(),
            Unit4::MinusI => -i,
        }
    }

    pub fn conj(self) -> Unit4 {
        match self {
            Unit4::I => Unit4::MinusI,
            Unit4::MinusI => Unit4::I,
            u => u,
        }
    }
}

/// Two degree-one forms over `Q̃` attached to a point and a 2-torsion index.
#[derive(Clone, Debug)]
pub struct LineForms {
    pub forms: [NcTensor; 2],
    pub xi: usize,
    pub pattern: [Unit4; 2],
}

/// `β_a y_a + m_1 β_b y_b` and `m_2 β_c y_c + β_d y_d`.
pub fn qtilde_forms(p: &ProjPoint, i: usize, pattern: [Unit4; 2], params: &Params) -> Result<[NcTensor; 2], RepError> {
    let [f1, f2] = secant_coeffs(p, i)?;
    let ((a, b), (c, d)) = secant_pairs(i);
    let t = p.tower();
    let [m1, m2] = pattern.map(|m| m.value(&params.i));
    Ok([
        form(t, &[(a, f1.0.clone()), (b, &m1 * &f1.1)]),
        form(t, &[(c, &m2 * &f2.0), (d, f2.1.clone())]),
    ])
}

pub fn line_module_dims(a: &QuadAlgebra, forms: &[NcTensor; 2], nmax: usize) -> Result<Vec<usize>, RepError> {
    Ok(a.left_quotient_dims(forms, nmax)?)
}

/// `A / A·W` has dimensions `1, 2, ..., nmax + 1`.
pub fn verify_line_module(a: &QuadAlgebra, forms: &[NcTensor; 2], nmax: usize) -> Result<bool, RepError> {
    // degree two is cheap and rules out most candidates
    if nmax >= 2 && line_module_dims(a, forms, 2)? != [1, 2, 3] {
        return Ok(false);
    }
    let want: Vec<usize> = (1..=nmax + 1).collect();
    Ok(line_module_dims(a, forms, nmax)? == want)
}

/// Search the sixteen patterns `(m_1, m_2)`, starting with `(i, i)`.
pub fn line_forms_qtilde(
    a: &QuadAlgebra,
    params: &Params,
    p: &ProjPoint,
    i: usize,
    nmax: usize,
) -> Result<LineForms, RepError> {
    if *p == gamma_act(i, p) {
        return Err(RepError::DegenerateSecant);
    }
    for m1 in Unit4::SEARCH_ORDER {
        for m2 in Unit4::SEARCH_ORDER {
            let pattern = [m1, m2];
            let forms = qtilde_forms(p, i, pattern, params)?;
            if verify_line_module(a, &forms, nmax)? {
                return Ok(LineForms { forms, xi: i, pattern });
            }
        }
    }
    Err(RepError::NoValidPattern(i))
}

/// Two random forms with small integer coefficients.
pub fn random_forms(seed: u64) -> [NcTensor; 2] {
    let q = TowerField::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<FieldElem> { (0..4).map(|_| q.from_int(rng.gen_range(-9..=9))).collect() };
    loop {
        let (a, b) = (draw(), draw());
        let m = Matrix::from_rows(vec![a.clone(), b.clone()]);
        if m.rank() == 2 {
            return [NcTensor::linear(&a), NcTensor::linear(&b)];
        }
    }
}

fn form_coeffs(f: &NcTensor, t: &TowerField) -> Vec<FieldElem> {
    (0..4)
        .map(|j| f.coeff(&[j as u8]).cloned().unwrap_or_else(|| t.zero()))
        .collect()
}

fn in_span(span: &[NcTensor; 2], v: &[FieldElem], t: &TowerField) -> bool {
    let mut rows: Vec<Vec<FieldElem>> = span.iter().map(|f| form_coeffs(f, t)).collect();
    let r = Matrix::from_rows(rows.clone()).rank();
    rows.push(v.to_vec());
    Matrix::from_rows(rows).rank() == r
}

/// Coordinates of `q_j w` in the basis `u = (0, 1)`, `v = (1, 0)`.
fn quaternion_coords(params: &Params) -> [[[FieldElem; 2]; 2]; 4] {
    let basis = quaternion_basis(&params.i);
    let t = &params.tower;
    let u = [t.zero(), t.one()];
    let v = [t.one(), t.zero()];
    std::array::from_fn(|j| {
        [&u, &v].map(|w| {
            let img = basis.mats[j].apply(w);
            [img[1].clone(), img[0].clone()]
        })
    })
}

/// Whether both forms kill `e ⊗ u + e' ⊗ v` in degree one, where `e` is
/// annihilated by the `Q`-forms of the secant through `p, γ_i(p)` and `e'` by
/// the flipped forms.
pub fn degree_one_annihilation(params: &Params, p: &ProjPoint, lf: &LineForms) -> Result<bool, RepError> {
    let t = p.tower().clone();
    let span_e = line_forms_q(p, lf.xi, false)?;
    let span_f = line_forms_q(p, lf.xi, true)?;
    let qc = quaternion_coords(params);
    for f in &lf.forms {
        let c = form_coeffs(f, &t);
        // w = 0 is u (on e), w = 1 is v (on e'); component 0 is u, 1 is v
        for (w, span) in [(0usize, &span_e), (1, &span_f)] {
            for comp in [0, 1] {
                let coeffs: Vec<FieldElem> = c.iter().zip(&qc).map(|(cj, q)| cj * &q[w][comp]).collect();
                if !in_span(span, &coeffs, &t) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantReport {
    pub relations_hold: bool,
    pub klein_four: bool,
}

impl EquivariantReport {
    pub fn passed(&self) -> bool {
        self.relations_hold && self.klein_four
    }
}

/// `φ_1 = diag(1, -1, -1, 1)` and `φ_2 = [[0, S], [S, 0]]` with `S` the swap,
/// on the basis `e⊗u, e⊗v, e'⊗u, e'⊗v`.
pub fn equivariant_frame(t: &TowerField) -> [Matrix<FieldElem>; 3] {
    let mut p1 = Matrix::filled(4, 4, t.zero());
    for (k, s) in [1, -1, -1, 1].iter().enumerate() {
        p1.set(k, k, t.from_int(*s));
    }
    let mut p2 = Matrix::filled(4, 4, t.zero());
    for k in 0..4 {
        p2.set(k, 3 - k, t.one());
    }
    let p3 = p1.mul(&p2);
    [p1, p2, p3]
}

fn block_diag(a: &Matrix<FieldElem>, t: &TowerField) -> Matrix<FieldElem> {
    let mut m = Matrix::filled(4, 4, t.zero());
    for blk in 0..2 {
        for r in 0..2 {
            for c in 0..2 {
                m.set(2 * blk + r, 2 * blk + c, a.get(r, c).clone());
            }
        }
    }
    m
}

/// `φ_ω (1 ⊗ A_q) = (1 ⊗ A_{q_ω q q_ω^{-1}}) φ_ω` for all `q` and `ω`, and the
/// `φ_ω` form a Klein four-group.
pub fn verify_equivariant_table(params: &Params) -> EquivariantReport {
    let t = &params.tower;
    let frame = equivariant_frame(t);
    let basis = quaternion_basis(&params.i);
    let qc = quaternion_coords(params);
    let action = |m: &Matrix<FieldElem>| {
        // columns: coordinates of m·u and m·v in (u, v)
        let u = [t.zero(), t.one()];
        let v = [t.one(), t.zero()];
        let (mu, mv) = (m.apply(&u), m.apply(&v));
        block_diag(
            &Matrix::from_rows(vec![vec![mu[1].clone(), mv[1].clone()], vec![mu[0].clone(), mv[0].clone()]]),
            t,
        )
    };
    debug_assert!((0..4).all(|j| action(&basis.mats[j]).get(0, 0) == &qc[j][0][0]));
    let mut ok = true;
    for (w, phi) in frame.iter().enumerate() {
        let qw = &basis.mats[w + 1];
        let qw_inv = qw.inverse().expect("quaternion basis is invertible");
        for q in &basis.mats {
            let conj = qw.mul(q).mul(&qw_inv);
            ok &= phi.mul(&action(q)) == action(&conj).mul(phi);
        }
    }
    let id = Matrix::identity(4, &t.one());
    let [p1, p2, p3] = &frame;
    let klein = p1.mul(p1) == id
        && p2.mul(p2) == id
        && p3.mul(p3) == id
        && p1.mul(p2) == p2.mul(p1)
        && *p1 != id
        && *p2 != id
        && *p3 != id;
    EquivariantReport {
        relations_hold: ok,
        klein_four: klein,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurveE;
    use crate::pointscheme::build_point_family;
    use crate::sklyanin::{q_relations, qtilde_relations};

    #[test]
    fn point_modules_and_periods() {
        let p = Params::defaults();
        let f = build_point_family(&p);
        let a = qtilde_relations(&p);
        for k in 0..20 {
            let w = point_module_witness(&a, &f, k, 6).unwrap();
            let expected = match w.family {
                FamilyLabel::Infinity | FamilyLabel::Zero => 1,
                _ => 2,
            };
            assert_eq!(w.period(), Some(expected));
        }
    }

    #[test]
    fn theta_constants_at_defaults() {
        let p = Params::defaults();
        let f = build_point_family(&p);
        let exp = expected_theta_constants(&p);
        assert_eq!(exp[2], Rat::new(4, 7));
        assert_eq!(exp[3], Rat::new(-36, 7));
        for k in 0..20 {
            let g = k / 4;
            assert_eq!(theta_constant(&f, k), p.tower.from_rat(exp[g].clone()), "point {k}");
        }
    }

    #[test]
    fn fat_points_span() {
        let p = Params::defaults();
        let e = CurveE::new(&p).unwrap();
        let (pt, t) = e.sample_point(&Rat::one()).unwrap();
        let q = q_relations(&p);
        assert!(fat_point_span_check(&q, &p, &pt, 3, &[t.one(), t.zero()]).unwrap());
        assert!(fat_point_span_check(&q, &p, &pt, 3, &[t.one(), p.i.embed(&t)]).unwrap());
        assert_eq!(
            fat_point_span_check(&q, &p, &pt, 3, &[t.zero(), t.zero()]),
            Err(RepError::ZeroVector)
        );
    }

    #[test]
    fn secant_forms_over_q() {
        let p = Params::defaults();
        let e = CurveE::new(&p).unwrap();
        let (pt, _) = e.sample_point(&Rat::one()).unwrap();
        let q = q_relations(&p);
        for i in 1..=3 {
            let fs = line_forms_q(&pt, i, false).unwrap();
            for f in &fs {
                for g in [0, i] {
                    assert!(f.eval_multilinear(&[gamma_act(g, &pt).coords()]).is_zero());
                }
            }
            let (j, k) = match i {
                1 => (2, 3),
                2 => (1, 3),
                _ => (1, 2),
            };
            let fl = line_forms_q(&pt, i, true).unwrap();
            for f in &fl {
                for g in [j, k] {
                    assert!(f.eval_multilinear(&[gamma_act(g, &pt).coords()]).is_zero());
                }
            }
            assert!(verify_line_module(&q, &fs, 3).unwrap());
        }
    }

    #[test]
    fn first_line_module_over_qtilde() {
        let p = Params::defaults();
        let e = CurveE::new(&p).unwrap();
        let (pt, _) = e.sample_point(&Rat::one()).unwrap();
        let a = qtilde_relations(&p);
        let lf = line_forms_qtilde(&a, &p, &pt, 1, 3).unwrap();
        assert_eq!(lf.pattern, [Unit4::I, Unit4::I]);
        assert!(degree_one_annihilation(&p, &pt, &lf).unwrap());
        for m1 in Unit4::SEARCH_ORDER {
            for m2 in Unit4::SEARCH_ORDER {
                let f = qtilde_forms(&pt, 1, [m1, m2], &p).unwrap();
                let imaginary = [m1, m2].iter().all(|m| matches!(m, Unit4::I | Unit4::MinusI));
                assert_eq!(verify_line_module(&a, &f, 3).unwrap(), imaginary, "{m1:?} {m2:?}");
            }
        }
        // dim Q̃_2 = 10 and generic forms give Q̃_1 y ∩ Q̃_1 y' = 0
        for seed in 0..5 {
            let r = random_forms(seed);
            assert_eq!(line_module_dims(&a, &r, 2).unwrap(), vec![1, 2, 10 - 8]);
            assert!(!verify_line_module(&a, &r, 4).unwrap());
        }
    }

    #[test]
    fn line_modules_for_every_xi() {
        let p = Params::defaults();
        let e = CurveE::new(&p).unwrap();
        let a = qtilde_relations(&p);
        let q = q_relations(&p);
        for s in e.default_seeds(3) {
            let (pt, _) = e.sample_point(&s).unwrap();
            for i in 1..=3 {
                let lf = line_forms_qtilde(&a, &p, &pt, i, 4).unwrap();
                assert_eq!(lf.pattern, [Unit4::I, Unit4::I]);
                let conj = qtilde_forms(&pt, i, lf.pattern.map(Unit4::conj), &p).unwrap();
                assert!(verify_line_module(&a, &conj, 4).unwrap());
                let moved = gamma_act(2, &pt);
                let tr = qtilde_forms(&moved, i, lf.pattern, &p).unwrap();
                assert!(verify_line_module(&a, &tr, 4).unwrap());
                for flipped in [false, true] {
                    assert!(verify_line_module(&q, &line_forms_q(&pt, i, flipped).unwrap(), 4).unwrap());
                }
            }
        }
    }

    #[test]
    fn equivariant_frame_is_klein_four() {
        let rep = verify_equivariant_table(&Params::defaults());
        assert!(rep.passed(), "{rep:?}");
    }
}
