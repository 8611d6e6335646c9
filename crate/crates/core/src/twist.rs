//! Gradings by finite abelian groups, 2-cocycles and cocycle twists of
//! quadratic presentations, plus two finite cohomological checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{proportional, Matrix};
use crate::ncalg::{NcTensor, QuadAlgebra};
use crate::scalars::{FieldElem, TowerField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistError {
    #[error("q_{g} q_{h} is not a scalar multiple of q_({g}+{h})")]
    NotProjectiveBasis { g: usize, h: usize },
    #[error("twisting elements of degree {0} is not supported")]
    UnsupportedDegree(usize),
    #[error("could not extend the tower: {0}")]
    TowerExtensionFailed(String),
    #[error("only (Z/2)^2 is supported here")]
    UnsupportedGroup,
    #[error("character assignment has {found} entries for {expected} generators")]
    AssignmentMismatch { expected: usize, found: usize },
}

/// A product of cyclic groups `Z/o_1 × ... × Z/o_r`.
///
/// Elements are exponent vectors; the index of an element is its mixed-radix
/// value with the first factor varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingGroup {
    pub orders: Vec<u32>,
}

impl GradingGroup {
    pub fn new(orders: Vec<u32>) -> Self {
        assert!(orders.iter().all(|&o| o >= 1), "factor orders are positive");
        GradingGroup { orders }
    }

    pub fn klein() -> Self {
        GradingGroup::new(vec![2, 2])
    }

    pub fn trivial() -> Self {
        GradingGroup::new(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&o| o as usize).product()
    }

    pub fn element(&self, mut idx: usize) -> Vec<u32> {
        self.orders
            .iter()
            .map(|&o| {
                let e = (idx % o as usize) as u32;
                idx /= o as usize;
                e
            })
            .collect()
    }

    pub fn index(&self, g: &[u32]) -> usize {
        assert_eq!(g.len(), self.orders.len());
        let mut idx = 0;
        for (e, o) in g.iter().zip(&self.orders).rev() {
            idx = idx * *o as usize + (*e % *o) as usize;
        }
        idx
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn add(&self, g: &[u32], h: &[u32]) -> Vec<u32> {
        g.iter().zip(h).zip(&self.orders).map(|((a, b), o)| (a + b) % o).collect()
    }

    pub fn add_idx(&self, g: usize, h: usize) -> usize {
        self.index(&self.add(&self.element(g), &self.element(h)))
    }
}

/// The degree of each generator in the grading group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterAssignment {
    pub group: GradingGroup,
    pub chars: Vec<Vec<u32>>,
}

impl CharacterAssignment {
    /// `x_0, x_1, x_2, x_3` of degrees `0, χ_1, χ_2, χ_3` in `(Z/2)^2`.
    pub fn sklyanin() -> Self {
        CharacterAssignment {
            group: GradingGroup::klein(),
            chars: vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
        }
    }

    pub fn index_of(&self, generator: usize) -> usize {
        self.group.index(&self.chars[generator])
    }
}

/// A group-indexed family of invertible matrices with `q_g q_h ∈ k q_{g+h}`.
#[derive(Clone, Debug)]
pub struct MatrixBasis {
    pub group: GradingGroup,
    pub mats: Vec<Matrix<FieldElem>>,
}

/// `q_0 = 1`, `q_1 = diag(i, -i)`, `q_2 = [[0, i], [i, 0]]`, `q_3 = [[0, -1], [1, 0]]`.
pub fn quaternion_basis(i: &FieldElem) -> MatrixBasis {
    let t = i.tower();
    let (z, one) = (t.zero(), t.one());
    let ni = -i;
    let m = |rows: [[&FieldElem; 2]; 2]| Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| x.clone()).collect()).collect());
    MatrixBasis {
        group: GradingGroup::klein(),
        mats: vec![
            m([[&one, &z], [&z, &one]]),
            m([[i, &z], [&z, &ni]]),
            m([[&z, i], [i, &z]]),
            m([[&z, &(-&one)], [&one, &z]]),
        ],
    }
}

/// Clock `C = diag(1, ζ, ..., ζ^{n-1})` and shift `S e_r = e_{r+1}`.
pub fn clock_shift(n: usize, zeta: &FieldElem) -> (Matrix<FieldElem>, Matrix<FieldElem>) {
    let t = zeta.tower();
    let mut c = Matrix::filled(n, n, t.zero());
    let mut s = Matrix::filled(n, n, t.zero());
    for r in 0..n {
        c.set(r, r, zeta.pow(r as u32));
        s.set((r + 1) % n, r, t.one());
    }
    (c, s)
}

/// The basis `q_{(a,b)} = C^a S^b` of `M_n` graded by `(Z/n)^2`.
pub fn clock_shift_basis(n: usize, zeta: &FieldElem) -> MatrixBasis {
    let (c, s) = clock_shift(n, zeta);
    let group = GradingGroup::new(vec![n as u32, n as u32]);
    let one = zeta.tower().one();
    let power = |m: &Matrix<FieldElem>, e: u32| (0..e).fold(Matrix::identity(n, &one), |acc, _| acc.mul(m));
    let mats = group
        .elements()
        .iter()
        .map(|g| power(&c, g[0]).mul(&power(&s, g[1])))
        .collect();
    MatrixBasis { group, mats }
}

/// A 2-cocycle `μ: G × G → k^×`, stored as a table indexed by element indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle2 {
    pub group: GradingGroup,
    table: Vec<FieldElem>,
}

impl Cocycle2 {
    pub fn trivial(group: GradingGroup, tower: &TowerField) -> Self {
        let n = group.order();
        Cocycle2 {
            group,
            table: vec![tower.one(); n * n],
        }
    }

    pub fn from_table(group: GradingGroup, table: Vec<FieldElem>) -> Self {
        assert_eq!(table.len(), group.order() * group.order());
        Cocycle2 { group, table }
    }

    pub fn value(&self, g: usize, h: usize) -> &FieldElem {
        &self.table[g * self.group.order() + h]
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.group.order()).all(|g| self.value(0, g).is_one() && self.value(g, 0).is_one())
    }

    /// `μ(g,h) μ(g+h,k) = μ(h,k) μ(g,h+k)` for all `g, h, k`, with no zero values.
    pub fn satisfies_cocycle_identity(&self) -> bool {
        let n = self.group.order();
        if self.table.iter().any(FieldElem::is_zero) {
            return false;
        }
        (0..n).all(|g| {
            (0..n).all(|h| {
                (0..n).all(|k| {
                    let gh = self.group.add_idx(g, h);
                    let hk = self.group.add_idx(h, k);
                    self.value(g, h) * self.value(gh, k) == self.value(h, k) * self.value(g, hk)
                })
            })
        })
    }

    pub fn pointwise_inverse(&self) -> Cocycle2 {
        Cocycle2 {
            group: self.group.clone(),
            table: self.table.iter().map(|c| c.inv().expect("cocycle values are units")).collect(),
        }
    }
}

pub fn cocycle_from_matrix_basis(basis: &MatrixBasis) -> Result<Cocycle2, TwistError> {
    let g = &basis.group;
    let n = g.order();
    let flat = |m: &Matrix<FieldElem>| m.to_rows().concat();
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let prod = flat(&basis.mats[a].mul(&basis.mats[b]));
            let target = flat(&basis.mats[g.add_idx(a, b)]);
            let err = TwistError::NotProjectiveBasis { g: a, h: b };
            if !proportional(&prod, &target) {
                return Err(err);
            }
            let k = target.iter().position(|x| !x.is_zero()).ok_or(err.clone())?;
            table.push(&prod[k] * &target[k].inv().map_err(|_| err)?);
        }
    }
    Ok(Cocycle2::from_table(g.clone(), table))
}

fn word_factor(word: &[u8], chars: &CharacterAssignment, mu: &Cocycle2) -> FieldElem {
    let g = chars.index_of(word[0] as usize);
    let h = chars.index_of(word[1] as usize);
    mu.value(g, h).inv().expect("cocycle values are units")
}

fn check_assignment(gens: usize, chars: &CharacterAssignment) -> Result<(), TwistError> {
    if chars.chars.len() != gens {
        return Err(TwistError::AssignmentMismatch {
            expected: gens,
            found: chars.chars.len(),
        });
    }
    Ok(())
}

/// Rescale the coefficient of each word `x_i x_j` by `μ(χ_i, χ_j)^{-1}`.
pub fn twist_element(z: &NcTensor, chars: &CharacterAssignment, mu: &Cocycle2) -> Result<NcTensor, TwistError> {
    if z.degree() != 2 {
        return Err(TwistError::UnsupportedDegree(z.degree()));
    }
    check_assignment(z.gens(), chars)?;
    Ok(z.map_terms(|w, c| c * &word_factor(w, chars, mu)))
}

/// The twisted presentation. Generator labels are kept.
pub fn twist_algebra(a: &QuadAlgebra, chars: &CharacterAssignment, mu: &Cocycle2) -> Result<QuadAlgebra, TwistError> {
    check_assignment(a.gens(), chars)?;
    let rels = a
        .relations()
        .iter()
        .map(|r| twist_element(r, chars, mu))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuadAlgebra::new(a.labels().to_vec(), rels, a.tower().clone()).expect("twisting preserves independence"))
}

/// Integer coefficients of the cyclotomic polynomial `Φ_n`, constant term first.
pub fn cyclotomic(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    let mut p = vec![0i64; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = exact_div(&p, &cyclotomic(d));
    }
    p
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd] / den[dd];
        q[k] = c;
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// A tower containing a primitive `n`-th root of unity, and that root.
pub fn root_of_unity(n: usize) -> Result<(TowerField, FieldElem), TwistError> {
    let q = TowerField::rationals();
    match n {
        0 => Err(TwistError::TowerExtensionFailed("n must be positive".into())),
        1 => Ok((q.clone(), q.one())),
        2 => Ok((q.clone(), q.from_int(-1))),
        _ => {
            let phi = cyclotomic(n);
            let lower: Vec<FieldElem> = phi[..phi.len() - 1].iter().map(|&c| q.from_int(c)).collect();
            let t = q
                .adjoin_root(&lower, "z")
                .map_err(|e| TwistError::TowerExtensionFailed(e.to_string()))?;
            let z = t.top_generator();
            Ok((t, z))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsorReport {
    pub n: usize,
    pub eigenspace_dims: Vec<usize>,
    pub all_invertible: bool,
    pub strongly_graded: bool,
}

impl TorsorReport {
    pub fn passed(&self) -> bool {
        self.eigenspace_dims.iter().all(|&d| d == 1) && self.all_invertible && self.strongly_graded
    }
}

fn conjugation_operator(m: &Matrix<FieldElem>, minv: &Matrix<FieldElem>, n: usize, one: &FieldElem) -> Matrix<FieldElem> {
    let zero = one.tower().zero();
    let mut op = Matrix::filled(n * n, n * n, zero.clone());
    for a in 0..n {
        for b in 0..n {
            let mut e = Matrix::filled(n, n, zero.clone());
            e.set(a, b, one.clone());
            let img = m.mul(&e).mul(minv);
            for r in 0..n {
                for s in 0..n {
                    op.set(r * n + s, a * n + b, img.get(r, s).clone());
                }
            }
        }
    }
    op
}

/// Decompose `M_n` under conjugation by clock and shift into character spaces.
pub fn torsor_report(n: usize) -> Result<TorsorReport, TwistError> {
    let (t, zeta) = root_of_unity(n)?;
    let one = t.one();
    let (c, s) = clock_shift(n, &zeta);
    let inv = |m: &Matrix<FieldElem>| m.inverse().map_err(|e| TwistError::TowerExtensionFailed(e.to_string()));
    let lc = conjugation_operator(&c, &inv(&c)?, n, &one);
    let ls = conjugation_operator(&s, &inv(&s)?, n, &one);
    let group = GradingGroup::new(vec![n as u32, n as u32]);
    let id = Matrix::identity(n * n, &one);
    let mut dims = Vec::new();
    let mut spans: Vec<Option<Matrix<FieldElem>>> = Vec::new();
    for g in group.elements() {
        let a = lc.sub(&id.scale(&zeta.pow(g[0])));
        let b = ls.sub(&id.scale(&zeta.pow(g[1])));
        let mut rows = a.to_rows();
        rows.extend(b.to_rows());
        let ker = Matrix::from_rows(rows).kernel();
        dims.push(ker.len());
        spans.push(ker.first().map(|v| Matrix::from_rows(v.chunks(n).map(<[_]>::to_vec).collect())));
    }
    let all_invertible = spans.iter().all(|m| m.as_ref().is_some_and(|m| !m.det().is_zero()));
    let mut strongly_graded = all_invertible;
    if strongly_graded {
        let ord = group.order();
        'outer: for g in 0..ord {
            for h in 0..ord {
                let prod = spans[g].as_ref().unwrap().mul(spans[h].as_ref().unwrap());
                let target = spans[group.add_idx(g, h)].as_ref().unwrap();
                if !proportional(&prod.to_rows().concat(), &target.to_rows().concat()) {
                    strongly_graded = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(TorsorReport {
        n,
        eigenspace_dims: dims,
        all_invertible,
        strongly_graded,
    })
}

pub fn torsor_strong_grading_check(n: usize) -> Result<bool, TwistError> {
    Ok(torsor_report(n)?.passed())
}

/// How a generator of `(Z/2)^2` acts on `μ_2 × μ_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mu2Action {
    Trivial,
    Swap,
}

/// An element of `μ_2 × μ_2`, written as a pair of signs.
pub type Mu2Pair = [i8; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub z1_size: usize,
    pub b1_size: usize,
    pub h1_size: usize,
    pub is_cocycle: Option<bool>,
    pub is_coboundary: Option<bool>,
}

fn act(actions: [Mu2Action; 2], g: &[u32], m: Mu2Pair) -> Mu2Pair {
    let mut m = m;
    for (k, a) in actions.iter().enumerate() {
        if g[k] == 1 && *a == Mu2Action::Swap {
            m.swap(0, 1);
        }
    }
    m
}

fn mul(a: Mu2Pair, b: Mu2Pair) -> Mu2Pair {
    [a[0] * b[0], a[1] * b[1]]
}

const MU2: [Mu2Pair; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];

fn is_cocycle(g: &GradingGroup, actions: [Mu2Action; 2], f: &[Mu2Pair; 4]) -> bool {
    (0..4).all(|a| (0..4).all(|b| f[g.add_idx(a, b)] == mul(f[a], act(actions, &g.element(a), f[b]))))
}

/// Exhaustive `H^1((Z/2)^2, μ_2 × μ_2)` for the given generator actions, with
/// membership tests for an optional function `f` indexed by group elements.
pub fn mu2_cohomology(
    g: &GradingGroup,
    actions: [Mu2Action; 2],
    f: Option<&[Mu2Pair; 4]>,
) -> Result<CohomologyReport, TwistError> {
    if g.orders != [2, 2] {
        return Err(TwistError::UnsupportedGroup);
    }
    let mut z1 = Vec::new();
    for code in 0..256usize {
        let cand: [Mu2Pair; 4] = std::array::from_fn(|k| MU2[(code >> (2 * k)) & 3]);
        if is_cocycle(g, actions, &cand) {
            z1.push(cand);
        }
    }
    let mut b1: Vec<[Mu2Pair; 4]> = MU2
        .iter()
        .map(|&m| std::array::from_fn(|k| mul(act(actions, &g.element(k), m), m)))
        .collect();
    b1.sort();
    b1.dedup();
    Ok(CohomologyReport {
        z1_size: z1.len(),
        b1_size: b1.len(),
        h1_size: z1.len() / b1.len(),
        is_cocycle: f.map(|f| is_cocycle(g, actions, f)),
        is_coboundary: f.map(|f| b1.contains(f)),
    })
}

/// The action used for the equivariant structures: `ξ` trivial, `ξ'` by swap.
pub const SWAP_ACTION: [Mu2Action; 2] = [Mu2Action::Trivial, Mu2Action::Swap];

/// `f(0) = f(ξ') = (1,1)`, `f(ξ) = f(ξ+ξ') = (-1,-1)`.
pub const SIGN_COCYCLE: [Mu2Pair; 4] = [[1, 1], [-1, -1], [1, 1], [-1, -1]];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sklyanin::{central_elements, q_relations, qtilde_relations, CentralElement, Params};

    fn quaternion_cocycle(p: &Params) -> Cocycle2 {
        cocycle_from_matrix_basis(&quaternion_basis(&p.i)).unwrap()
    }

    #[test]
    fn group_indexing() {
        let g = GradingGroup::new(vec![2, 3]);
        assert_eq!(g.order(), 6);
        for i in 0..6 {
            assert_eq!(g.index(&g.element(i)), i);
        }
        assert_eq!(g.add(&[1, 2], &[1, 2]), vec![0, 1]);
    }

    #[test]
    fn quaternion_values() {
        let p = Params::defaults();
        let mu = quaternion_cocycle(&p);
        let m1 = p.tower.from_int(-1);
        assert!(mu.value(1, 2).is_one());
        assert_eq!(mu.value(2, 1), &m1);
        for j in 1..4 {
            assert_eq!(mu.value(j, j), &m1);
        }
        assert!(mu.is_normalized());
        assert!(mu.satisfies_cocycle_identity());
    }

    #[test]
    fn trivial_group_gives_trivial_cocycle() {
        let q = TowerField::rationals();
        let b = MatrixBasis {
            group: GradingGroup::trivial(),
            mats: vec![Matrix::identity(2, &q.one())],
        };
        let mu = cocycle_from_matrix_basis(&b).unwrap();
        assert_eq!(mu, Cocycle2::trivial(GradingGroup::trivial(), &q));
    }

    #[test]
    fn non_projective_basis_is_rejected() {
        let q = TowerField::rationals();
        let one = q.one();
        let z = q.zero();
        let m = Matrix::from_rows(vec![vec![one.clone(), one.clone()], vec![z.clone(), one.clone()]]);
        let b = MatrixBasis {
            group: GradingGroup::new(vec![2]),
            mats: vec![Matrix::identity(2, &one), m],
        };
        assert!(matches!(cocycle_from_matrix_basis(&b), Err(TwistError::NotProjectiveBasis { .. })));
    }

    #[test]
    fn clock_shift_cocycle_takes_cube_root_values() {
        let (t, zeta) = root_of_unity(3).unwrap();
        let mu = cocycle_from_matrix_basis(&clock_shift_basis(3, &zeta)).unwrap();
        assert!(mu.satisfies_cocycle_identity());
        let powers: Vec<FieldElem> = (0..3).map(|k| zeta.pow(k)).collect();
        let g = &mu.group;
        for a in 0..9 {
            for b in 0..9 {
                assert!(powers.contains(mu.value(a, b)), "{:?} {:?}", g.element(a), g.element(b));
            }
        }
        assert_eq!(t.dim(), 2);
    }

    #[test]
    fn twist_of_q_is_qtilde() {
        let p = Params::defaults();
        let mu = quaternion_cocycle(&p);
        let chars = CharacterAssignment::sklyanin();
        let q = q_relations(&p);
        let t = twist_algebra(&q, &chars, &mu).unwrap();
        assert!(t.same_relations(&qtilde_relations(&p)));
        let tt = twist_algebra(&t, &chars, &mu).unwrap();
        assert!(tt.same_relations(&q));
    }

    #[test]
    fn twist_of_central_elements() {
        let p = Params::defaults();
        let mu = quaternion_cocycle(&p);
        let chars = CharacterAssignment::sklyanin();
        let om = central_elements(&p, CentralElement::Omega).unwrap();
        let th = central_elements(&p, CentralElement::Theta).unwrap();
        assert_eq!(twist_element(&om, &chars, &mu).unwrap(), th.neg());
        let omp = central_elements(&p, CentralElement::OmegaPrime).unwrap();
        let thp = central_elements(&p, CentralElement::ThetaPrime).unwrap();
        assert_eq!(twist_element(&omp, &chars, &mu).unwrap(), thp.neg());
        let x00 = NcTensor::monomial(4, &[0, 0], p.tower.one());
        assert_eq!(twist_element(&x00, &chars, &mu).unwrap(), x00);
        let x0 = NcTensor::generator(4, 0, &p.tower);
        assert_eq!(twist_element(&x0, &chars, &mu), Err(TwistError::UnsupportedDegree(1)));
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn matrix_torsors() {
        for n in 1..=4 {
            let r = torsor_report(n).unwrap();
            assert_eq!(r.eigenspace_dims.len(), n * n);
            assert!(r.passed(), "n = {n}: {r:?}");
        }
        assert!(torsor_strong_grading_check(0).is_err());
    }

    #[test]
    fn swap_module_cohomology() {
        let g = GradingGroup::klein();
        let r = mu2_cohomology(&g, SWAP_ACTION, Some(&SIGN_COCYCLE)).unwrap();
        assert_eq!((r.z1_size, r.b1_size, r.h1_size), (4, 2, 2));
        assert_eq!(r.is_cocycle, Some(true));
        assert_eq!(r.is_coboundary, Some(false));
        let zero = [[1, 1]; 4];
        let r0 = mu2_cohomology(&g, SWAP_ACTION, Some(&zero)).unwrap();
        assert_eq!((r0.is_cocycle, r0.is_coboundary), (Some(true), Some(true)));
        assert_eq!(
            mu2_cohomology(&GradingGroup::new(vec![4]), SWAP_ACTION, None),
            Err(TwistError::UnsupportedGroup)
        );
    }
}
