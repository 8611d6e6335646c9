//! The twenty points of the point scheme of `Q̃`, the involution `θ`, the
//! rank and minor checks on the multilinearized relations, and the map `σ`
//! for `Q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{gamma_act, MultiPoly, ProjPoint};
use crate::linalg::{proportional, Matrix};
use crate::ncalg::{QuadAlgebra, RelationMatrix};
use crate::scalars::{FieldElem, Rat, TowerField};
use crate::sklyanin::Params;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointSchemeError {
    #[error("point {0} is not one of the twenty family points")]
    NotInFamily(String),
    #[error("the relation matrix has rank {0} < 3 at the point")]
    RankDegenerate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyLabel {
    Infinity,
    Zero,
    One,
    Two,
    Three,
}

impl FamilyLabel {
    pub const ALL: [FamilyLabel; 5] = [
        FamilyLabel::Infinity,
        FamilyLabel::Zero,
        FamilyLabel::One,
        FamilyLabel::Two,
        FamilyLabel::Three,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyLabel::Infinity => "P_inf",
            FamilyLabel::Zero => "P_0",
            FamilyLabel::One => "P_1",
            FamilyLabel::Two => "P_2",
            FamilyLabel::Three => "P_3",
        }
    }

    /// The element of `Γ` by which `θ` acts on this group.
    pub fn theta_gamma(self) -> usize {
        match self {
            FamilyLabel::Infinity | FamilyLabel::Zero => 0,
            FamilyLabel::One => 1,
            FamilyLabel::Two => 2,
            FamilyLabel::Three => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub label: FamilyLabel,
    pub row: usize,
    pub point: ProjPoint,
}

/// The twenty points in table order: five groups of four rows.
#[derive(Clone, Debug)]
pub struct PointFamily {
    pub points: Vec<FamilyPoint>,
}

pub fn build_point_family(p: &Params) -> PointFamily {
    let t = &p.tower;
    let (i, a, b, c) = (&p.i, &p.a, &p.b, &p.c);
    let one = t.one();
    let z = t.zero();
    let ni = -i;
    let firsts: [Vec<FieldElem>; 4] = [
        vec![one.clone(), one.clone(), one.clone(), one.clone()],
        vec![b * c, ni.clone(), -&(i * b), -c],
        vec![a * c, -a, ni.clone(), -&(i * c)],
        vec![a * b, -&(i * a), -b, ni],
    ];
    let mut points = Vec::with_capacity(20);
    for j in 0..4 {
        let mut e = vec![z.clone(); 4];
        e[j] = one.clone();
        points.push(FamilyPoint {
            label: FamilyLabel::Infinity,
            row: j,
            point: ProjPoint::new(e).expect("nonzero"),
        });
    }
    for (k, first) in firsts.into_iter().enumerate() {
        let u = ProjPoint::new(first).expect("nonzero");
        for g in 0..4 {
            points.push(FamilyPoint {
                label: FamilyLabel::ALL[k + 1],
                row: g,
                point: gamma_act(g, &u),
            });
        }
    }
    PointFamily { points }
}

impl PointFamily {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, u: &ProjPoint) -> Option<usize> {
        self.points.iter().position(|fp| fp.point == *u)
    }

    pub fn contains(&self, u: &ProjPoint) -> bool {
        self.position(u).is_some()
    }

    /// `θ` applied to the stored representative of point `k`.
    pub fn theta_at(&self, k: usize) -> ProjPoint {
        let fp = &self.points[k];
        gamma_act(fp.label.theta_gamma(), &fp.point)
    }

    pub fn group(&self, label: FamilyLabel) -> impl Iterator<Item = &FamilyPoint> {
        self.points.iter().filter(move |fp| fp.label == label)
    }
}

pub fn theta(f: &PointFamily, u: &ProjPoint) -> Result<ProjPoint, PointSchemeError> {
    let k = f.position(u).ok_or_else(|| PointSchemeError::NotInFamily(u.to_string()))?;
    Ok(gamma_act(f.points[k].label.theta_gamma(), u))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCheck {
    pub family: FamilyLabel,
    pub row: usize,
    pub coords: Vec<String>,
    pub rank: usize,
    pub kernel_is_theta: bool,
    pub reverse_pair_vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSchemeReport {
    pub points: Vec<PointCheck>,
    pub distinct_points: usize,
    pub theta_is_involution: bool,
    pub theta_commutes_with_gamma: bool,
    pub random_points: usize,
    pub random_rank_four: usize,
}

impl PointSchemeReport {
    pub fn passed(&self) -> bool {
        self.points
            .iter()
            .all(|c| c.rank == 3 && c.kernel_is_theta && c.reverse_pair_vanishes)
            && self.distinct_points == 20
            && self.theta_is_involution
            && self.theta_commutes_with_gamma
            && self.random_rank_four == self.random_points
    }
}

fn relation_values(a: &QuadAlgebra, u: &ProjPoint, v: &ProjPoint) -> Vec<FieldElem> {
    a.relations().iter().map(|r| r.eval_bilinear(u.coords(), v.coords())).collect()
}

/// Rank of `M(u)` and, at rank three, its kernel direction.
pub fn rank_and_kernel(m: &RelationMatrix, u: &ProjPoint) -> (usize, Option<ProjPoint>) {
    let mu = m.eval(u.coords());
    let ker = mu.kernel();
    let rank = m.cols() - ker.len();
    let dir = (ker.len() == 1).then(|| ProjPoint::new(ker[0].clone()).expect("kernel vector is nonzero"));
    (rank, dir)
}

/// Integer points with entries in `[-9, 9]` avoiding the family.
pub fn random_points(f: &PointFamily, n: usize, seed: u64) -> Vec<ProjPoint> {
    let q = TowerField::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        if let Ok(p) = ProjPoint::from_ints(&c, &q) {
            if !f.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Rank three with kernel `θ(u)` at every family point, and rank four at
/// `random` random points off the family.
pub fn verify_point_scheme(a: &QuadAlgebra, f: &PointFamily, random: usize, seed: u64) -> PointSchemeReport {
    let m = a.multilinearize();
    let points: Vec<PointCheck> = (0..f.len())
        .into_par_iter()
        .map(|k| {
            let fp = &f.points[k];
            let th = f.theta_at(k);
            let (rank, dir) = rank_and_kernel(&m, &fp.point);
            PointCheck {
                family: fp.label,
                row: fp.row,
                coords: fp.point.to_strings(),
                rank,
                kernel_is_theta: dir.is_some_and(|d| d == th),
                reverse_pair_vanishes: relation_values(a, &th, &fp.point).iter().all(FieldElem::is_zero),
            }
        })
        .collect();
    let distinct = (0..f.len())
        .filter(|&i| (0..i).all(|j| f.points[i].point != f.points[j].point))
        .count();
    let theta_is_involution = (0..f.len()).all(|k| theta(f, &f.theta_at(k)).is_ok_and(|p| p == f.points[k].point));
    let theta_commutes_with_gamma = (0..f.len()).all(|k| {
        (1..4).all(|g| {
            let u = &f.points[k].point;
            theta(f, &gamma_act(g, u)).is_ok_and(|p| p == gamma_act(g, &f.theta_at(k)))
        })
    });
    let rand_pts = random_points(f, random, seed);
    let random_rank_four = rand_pts.par_iter().filter(|p| rank_and_kernel(&m, p).0 == 4).count();
    PointSchemeReport {
        points,
        distinct_points: distinct,
        theta_is_involution,
        theta_commutes_with_gamma,
        random_points: random,
        random_rank_four,
    }
}

fn det_poly(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(m[0][0].nvars());
    for j in 0..n {
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][j].mul(&det_poly(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// The fifteen maximal minors of the 6 × 4 matrix of linear forms, rows
/// chosen in lexicographic order.
pub fn minors(a: &QuadAlgebra) -> Vec<MultiPoly> {
    let m = a.multilinearize();
    let q = TowerField::rationals();
    let forms: Vec<Vec<MultiPoly>> = (0..m.rows())
        .map(|k| (0..m.cols()).map(|j| MultiPoly::linear(&m.form_coeffs(k, j, &q))).collect())
        .collect();
    let mut out = Vec::new();
    for r in row_choices(m.rows(), 4) {
        let sub: Vec<Vec<MultiPoly>> = r.iter().map(|&k| forms[k].clone()).collect();
        out.push(det_poly(&sub));
    }
    out
}

fn row_choices(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = row_choices(n - 1, k);
    for mut c in row_choices(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out.sort();
    out
}

/// The factored quartics: twelve products of a binomial with one of the four
/// quadrics `L_A, L_B, L_C, L_D`, and three further quartics.
pub fn factored_minor_list(p: &Params) -> Vec<MultiPoly> {
    let q = TowerField::rationals();
    let (al, be, ga) = (&p.alpha, &p.beta, &p.gamma);
    let one = Rat::one();
    let c = |r: &Rat| q.from_rat(r.clone());
    let mono = |e: [u32; 4], r: &Rat| MultiPoly::monomial(e.to_vec(), c(r));
    let sq = |j: usize| {
        let mut e = [0u32; 4];
        e[j] = 2;
        e
    };
    let pr = |i: usize, j: usize| {
        let mut e = [0u32; 4];
        e[i] += 1;
        e[j] += 1;
        e
    };
    let quad = |k: [Rat; 4]| {
        (0..4).fold(MultiPoly::zero(4), |acc, j| acc.add(&mono(sq(j), &k[j])))
    };
    let bin = |a: (usize, usize, Rat), b: (usize, usize, Rat)| mono(pr(a.0, a.1), &a.2).add(&mono(pr(b.0, b.1), &b.2));
    let m1 = -&one;
    let la = quad([one.clone(), be * ga, al * ga, al * be]);
    let lb = quad([one.clone(), m1.clone(), -al, al.clone()]);
    let lc = quad([one.clone(), be.clone(), m1.clone(), -be]);
    let ld = quad([one.clone(), -ga, ga.clone(), m1.clone()]);
    let mut out = vec![
        bin((2, 3, one.clone()), (0, 1, m1.clone())).mul(&la),
        bin((1, 3, one.clone()), (0, 2, m1.clone())).mul(&la),
        bin((1, 2, one.clone()), (0, 3, m1.clone())).mul(&la),
        bin((0, 1, one.clone()), (2, 3, one.clone())).mul(&lb),
        bin((0, 2, one.clone()), (1, 3, be.clone())).mul(&lb),
        bin((0, 3, one.clone()), (1, 2, -ga)).mul(&lb),
        bin((0, 1, one.clone()), (2, 3, -al)).mul(&lc),
        bin((0, 2, one.clone()), (1, 3, one.clone())).mul(&lc),
        bin((0, 3, one.clone()), (1, 2, ga.clone())).mul(&lc),
        bin((0, 1, one.clone()), (2, 3, al.clone())).mul(&ld),
        bin((0, 2, one.clone()), (1, 3, -be)).mul(&ld),
        bin((0, 3, one.clone()), (1, 2, one.clone())).mul(&ld),
    ];
    let sum = |terms: &[([u32; 4], Rat)]| terms.iter().fold(MultiPoly::zero(4), |acc, (e, r)| acc.add(&mono(*e, r)));
    let e = |i: usize, j: usize| {
        let mut x = [0u32; 4];
        x[i] += 2;
        x[j] += 2;
        x
    };
    let ab = al * be;
    let bg = be * ga;
    let ag = al * ga;
    out.push(sum(&[
        (e(1, 3), ab.clone()),
        (e(2, 3), -&ab),
        (e(0, 1), be.clone()),
        (e(1, 3), -be),
        (e(0, 2), al.clone()),
        (e(2, 3), -al),
        (e(0, 1), one.clone()),
        (e(0, 2), m1.clone()),
    ]));
    out.push(sum(&[
        (e(1, 2), bg.clone()),
        (e(1, 3), -&bg),
        (e(0, 2), ga.clone()),
        (e(1, 2), -ga),
        (e(0, 3), be.clone()),
        (e(1, 3), -be),
        (e(0, 2), one.clone()),
        (e(0, 3), m1.clone()),
    ]));
    out.push(sum(&[
        (e(1, 2), ag.clone()),
        (e(2, 3), -&ag),
        (e(2, 3), al.clone()),
        (e(0, 1), -ga),
        (e(1, 2), ga.clone()),
        (e(0, 3), -al),
        (e(0, 1), one.clone()),
        (e(0, 3), m1),
    ]));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorsReport {
    pub count: usize,
    pub minors_rank: usize,
    pub factored_rank: usize,
    pub joint_rank: usize,
    pub vanish_on_family: bool,
    pub first_minor_proportional: bool,
}

impl MinorsReport {
    pub fn passed(&self) -> bool {
        self.count == 15
            && self.vanish_on_family
            && self.minors_rank == self.factored_rank
            && self.joint_rank == self.minors_rank
            && self.first_minor_proportional
    }
}

/// Vanishing of the minors on the family, and equality of spans with the
/// factored list over the 35 quartic monomials.
pub fn minors_check(a: &QuadAlgebra, p: &Params, f: &PointFamily) -> MinorsReport {
    let q = TowerField::rationals();
    let ms = minors(a);
    let fl = factored_minor_list(p);
    let vec_of = |m: &MultiPoly| m.coeff_vector(4, &q);
    let rank_of = |ps: &[&MultiPoly]| Matrix::from_rows(ps.iter().map(|m| vec_of(m)).collect()).rank();
    let mr: Vec<&MultiPoly> = ms.iter().collect();
    let fr: Vec<&MultiPoly> = fl.iter().collect();
    let joint: Vec<&MultiPoly> = ms.iter().chain(fl.iter()).collect();
    let vanish = ms
        .par_iter()
        .all(|m| f.points.iter().all(|fp| m.eval_point(&fp.point).is_zero()));
    MinorsReport {
        count: ms.len(),
        minors_rank: rank_of(&mr),
        factored_rank: rank_of(&fr),
        joint_rank: rank_of(&joint),
        vanish_on_family: vanish,
        first_minor_proportional: proportional(&vec_of(&ms[0]), &vec_of(&fl[0])),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourQuadricsReport {
    pub determinant: Rat,
    pub expected: Rat,
    pub sum_equals_product: bool,
}

impl FourQuadricsReport {
    pub fn passed(&self) -> bool {
        self.determinant == self.expected && !self.determinant.is_zero() && self.sum_equals_product
    }
}

/// Coefficient determinant of `L_A, L_B, L_C, L_D` in `y_0², ..., y_3²`.
pub fn four_quadrics_independence(p: &Params) -> FourQuadricsReport {
    let (al, be, ga) = (&p.alpha, &p.beta, &p.gamma);
    let one = Rat::one();
    let m1 = -&one;
    let m = Matrix::from_rows(vec![
        vec![one.clone(), be * ga, al * ga, al * be],
        vec![one.clone(), m1.clone(), -al, al.clone()],
        vec![one.clone(), be.clone(), m1.clone(), -be],
        vec![one.clone(), -ga, ga.clone(), m1],
    ]);
    let s = &(&(&one + &(al * be)) + &(be * ga)) + &(ga * al);
    let prod = &(&(&one + al) * &(&one + be)) * &(&one + ga);
    FourQuadricsReport {
        determinant: m.det(),
        expected: -&(&s * &s),
        sum_equals_product: s == prod,
    }
}

/// The kernel direction of `M_Q(p)`, for `p` where the rank is three.
pub fn sigma(q: &QuadAlgebra, p: &ProjPoint) -> Result<ProjPoint, PointSchemeError> {
    match rank_and_kernel(&q.multilinearize(), p) {
        (3, Some(v)) => Ok(v),
        (r, _) => Err(PointSchemeError::RankDegenerate(r)),
    }
}

/// Ranks of `M_Q` at the four coordinate points.
pub fn coordinate_point_ranks(q: &QuadAlgebra) -> [usize; 4] {
    let m = q.multilinearize();
    let t = TowerField::rationals();
    [0, 1, 2, 3].map(|j| rank_and_kernel(&m, &ProjPoint::basis(4, j, &t)).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurveE;
    use crate::sklyanin::{q_relations, qtilde_relations};

    #[test]
    fn table_entries() {
        let p = Params::defaults();
        let f = build_point_family(&p);
        assert_eq!(f.len(), 20);
        let u = &f.points[8].point;
        assert_eq!(f.points[8].label, FamilyLabel::One);
        let expected = ProjPoint::new(vec![&p.b * &p.c, -&p.i, -&(&p.i * &p.b), -&p.c]).unwrap();
        assert_eq!(*u, expected);
        let th = theta(&f, u).unwrap();
        let expected_th = ProjPoint::new(vec![&p.b * &p.c, -&p.i, &p.i * &p.b, p.c.clone()]).unwrap();
        assert_eq!(th, expected_th);
        assert_eq!((&p.b * &p.c).square(), p.tower.from_rat(Rat::new(-15, 7)));
        let p0 = ProjPoint::from_ints(&[1, -1, 1, -1], &p.tower).unwrap();
        assert_eq!(theta(&f, &p0).unwrap(), p0);
        let off = ProjPoint::from_ints(&[1, 2, 3, 4], &p.tower).unwrap();
        assert!(matches!(theta(&f, &off), Err(PointSchemeError::NotInFamily(_))));
    }

    #[test]
    fn rank_three_with_theta_kernel() {
        let p = Params::defaults();
        let f = build_point_family(&p);
        let rep = verify_point_scheme(&qtilde_relations(&p), &f, 20, 7);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn minors_span_the_factored_list() {
        let p = Params::defaults();
        let f = build_point_family(&p);
        let rep = minors_check(&qtilde_relations(&p), &p, &f);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn four_quadrics_determinant() {
        let rep = four_quadrics_independence(&Params::defaults());
        assert_eq!(rep.expected, -&Rat::new(576, 49));
        assert!(rep.passed());
    }

    #[test]
    fn sigma_preserves_the_curve() {
        let p = Params::defaults();
        let e = CurveE::new(&p).unwrap();
        let q = q_relations(&p);
        let (pts, _) = e.sample_points(&e.default_seeds(2)).unwrap();
        for pt in &pts {
            let s = sigma(&q, pt).unwrap();
            assert!(e.on_curve(&s));
            for g in 1..4 {
                assert_eq!(sigma(&q, &gamma_act(g, pt)).unwrap(), gamma_act(g, &s));
            }
        }
        assert!(coordinate_point_ranks(&q)[0] <= 3);
    }
}
