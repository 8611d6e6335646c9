//! Elimination over the smallest field that holds the coefficients.

use crate::linalg::{span_echelon, span_rank, Matrix, SparseVec};
use crate::scalars::{common_tower, FieldElem, Rat, TowerField};

/// Vectors moved to the smallest tower prefix holding all their entries.
pub(crate) enum Lowered {
    Rational(Vec<SparseVec<Rat>>),
    Tower(Vec<SparseVec<FieldElem>>),
}

fn common_of<'a>(it: impl Iterator<Item = &'a FieldElem>) -> Option<TowerField> {
    let mut acc: Option<TowerField> = None;
    for c in it {
        acc = Some(match acc {
            None => c.tower().clone(),
            Some(t) => common_tower(&t, c.tower()).expect("coefficients from incompatible towers"),
        });
    }
    acc
}

pub(crate) fn lower(vectors: Vec<SparseVec<FieldElem>>) -> Lowered {
    let top = common_of(vectors.iter().flat_map(|v| v.iter().map(|(_, c)| c)));
    let steps = vectors
        .iter()
        .flat_map(|v| v.iter().map(|(_, c)| c.min_steps()))
        .max()
        .unwrap_or(0);
    match top {
        Some(top) if steps > 0 => {
            let target = top.prefix(steps);
            let vs = vectors
                .into_iter()
                .map(|v| v.into_iter().map(|(i, c)| (i, c.embed(&top).restrict(&target))).collect())
                .collect();
            Lowered::Tower(vs)
        }
        _ => Lowered::Rational(
            vectors
                .into_iter()
                .map(|v| {
                    v.into_iter()
                        .map(|(i, c)| (i, c.as_rational().expect("rational coefficient")))
                        .collect()
                })
                .collect(),
        ),
    }
}

pub(crate) fn rank(vectors: Vec<SparseVec<FieldElem>>, ncols: usize) -> usize {
    match lower(vectors) {
        Lowered::Rational(vs) => span_rank(&vs, ncols),
        Lowered::Tower(vs) => span_rank(&vs, ncols),
    }
}

/// For each target, whether it lies in the span of `generators`.
pub(crate) fn membership(
    generators: Vec<SparseVec<FieldElem>>,
    targets: Vec<SparseVec<FieldElem>>,
    ncols: usize,
) -> Vec<bool> {
    let ng = generators.len();
    let mut all = generators;
    all.extend(targets);
    match lower(all) {
        Lowered::Rational(mut vs) => {
            let ts = vs.split_off(ng);
            let ech = span_echelon(&vs, ncols);
            ts.iter().map(|t| ech.contains(t)).collect()
        }
        Lowered::Tower(mut vs) => {
            let ts = vs.split_off(ng);
            let ech = span_echelon(&vs, ncols);
            ts.iter().map(|t| ech.contains(t)).collect()
        }
    }
}

fn raise_rows(rows: Vec<SparseVec<Rat>>) -> Vec<SparseVec<FieldElem>> {
    let q = TowerField::rationals();
    rows.into_iter()
        .map(|r| r.into_iter().map(|(i, c)| (i, q.from_rat(c))).collect())
        .collect()
}

/// Reduced echelon basis of the span, with entries in the lowered field.
pub(crate) fn reduced_basis(vectors: Vec<SparseVec<FieldElem>>, ncols: usize) -> Vec<SparseVec<FieldElem>> {
    match lower(vectors) {
        Lowered::Rational(vs) => raise_rows(span_echelon(&vs, ncols).reduced_rows()),
        Lowered::Tower(vs) => span_echelon(&vs, ncols).reduced_rows(),
    }
}

/// Basis of `{w : <v, w> = 0 for all v}` under the standard pairing.
pub(crate) fn orthogonal_complement(vectors: Vec<SparseVec<FieldElem>>, ncols: usize) -> Vec<SparseVec<FieldElem>> {
    let basis = reduced_basis(vectors, ncols);
    let q = TowerField::rationals();
    if basis.is_empty() {
        return (0..ncols).map(|i| vec![(i, q.one())]).collect();
    }
    let tower = common_of(basis.iter().flat_map(|v| v.iter().map(|(_, c)| c))).unwrap_or(q);
    let rows: Vec<Vec<FieldElem>> = basis
        .iter()
        .map(|v| {
            let mut dense = vec![tower.zero(); ncols];
            for (i, c) in v {
                dense[*i] = c.embed(&tower);
            }
            dense
        })
        .collect();
    Matrix::from_rows(rows)
        .kernel()
        .into_iter()
        .map(|k| k.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
        .collect()
}

/// A subspace of V^{⊗n} held as a reduced echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    pub rows: Vec<SparseVec<FieldElem>>,
}

impl Subspace {
    pub fn from_vectors(vectors: Vec<SparseVec<FieldElem>>, ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: reduced_basis(vectors, ambient),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &SparseVec<FieldElem>) -> bool {
        membership(self.rows.clone(), vec![v.clone()], self.ambient)[0]
    }

    /// Whether `self` ⊆ `other`.
    pub fn is_within(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        membership(other.rows.clone(), self.rows.clone(), self.ambient)
            .into_iter()
            .all(|b| b)
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_within(other)
    }
}
