use crate::linalg::{Matrix, SparseVec};
use crate::scalars::{FieldElem, TowerField};

use super::span::{self, Subspace};
use super::{NcError, NcTensor};

/// A quadratic algebra: the free algebra on `labels` modulo the two-sided
/// ideal generated by degree-two relations.
#[derive(Clone, Debug)]
pub struct QuadAlgebra {
    labels: Vec<String>,
    relations: Vec<NcTensor>,
    tower: TowerField,
}

impl QuadAlgebra {
    /// Relations are kept in the given order; they must be independent.
    pub fn new(labels: Vec<String>, relations: Vec<NcTensor>, tower: TowerField) -> Result<Self, NcError> {
        let g = labels.len();
        for (k, r) in relations.iter().enumerate() {
            if r.degree() != 2 {
                return Err(NcError::NotQuadratic(k));
            }
            if r.gens() != g {
                return Err(NcError::GeneratorMismatch {
                    expected: g,
                    found: r.gens(),
                });
            }
        }
        let rank = span::rank(relations.iter().map(NcTensor::to_sparse).collect(), g * g);
        if rank != relations.len() {
            return Err(NcError::DependentRelations);
        }
        Ok(QuadAlgebra {
            labels,
            relations,
            tower,
        })
    }

    /// The free algebra on `g` generators named `prefix0 .. prefix{g-1}`.
    pub fn free(g: usize, prefix: &str) -> Self {
        QuadAlgebra {
            labels: (0..g).map(|i| format!("{prefix}{i}")).collect(),
            relations: Vec::new(),
            tower: TowerField::rationals(),
        }
    }

    /// The commutative polynomial ring: relations `x_i x_j - x_j x_i`, `i < j`.
    pub fn commutative(g: usize, prefix: &str) -> Self {
        let q = TowerField::rationals();
        let mut rels = Vec::new();
        for i in 0..g {
            for j in i + 1..g {
                let mut r = NcTensor::zero(g, 2);
                r.add_term(vec![i as u8, j as u8], q.one());
                r.add_term(vec![j as u8, i as u8], -q.one());
                rels.push(r);
            }
        }
        QuadAlgebra::new((0..g).map(|i| format!("{prefix}{i}")).collect(), rels, q)
            .expect("commutator relations are independent")
    }

    /// The exterior algebra: relations `x_i^2` and `x_i x_j + x_j x_i`.
    pub fn exterior(g: usize, prefix: &str) -> Self {
        let q = TowerField::rationals();
        let mut rels = Vec::new();
        for i in 0..g {
            for j in i..g {
                let mut r = NcTensor::zero(g, 2);
                r.add_term(vec![i as u8, j as u8], q.one());
                if i != j {
                    r.add_term(vec![j as u8, i as u8], q.one());
                }
                rels.push(r);
            }
        }
        QuadAlgebra::new((0..g).map(|i| format!("{prefix}{i}")).collect(), rels, q)
            .expect("anticommutator relations are independent")
    }

    pub fn gens(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn relations(&self) -> &[NcTensor] {
        &self.relations
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    pub fn generator(&self, i: usize) -> NcTensor {
        NcTensor::generator(self.gens(), i, &self.tower)
    }

    /// Spanning vectors of V^{⊗i} ⊗ T ⊗ V^{⊗j} over all i + j = n - deg T.
    fn padded(&self, tensors: &[NcTensor], n: usize) -> Vec<SparseVec<FieldElem>> {
        let g = self.gens();
        let mut out = Vec::new();
        for t in tensors {
            let d = t.degree();
            if d > n {
                continue;
            }
            let base = t.to_sparse();
            if base.is_empty() {
                continue;
            }
            for i in 0..=(n - d) {
                let j = n - d - i;
                let gi = g.pow(i as u32);
                let gj = g.pow(j as u32);
                let gdj = g.pow((d + j) as u32);
                for p in 0..gi {
                    for s in 0..gj {
                        let v: SparseVec<FieldElem> =
                            base.iter().map(|(m, c)| (p * gdj + m * gj + s, c.clone())).collect();
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    fn relation_vectors(&self, n: usize) -> Vec<SparseVec<FieldElem>> {
        self.padded(&self.relations, n)
    }

    fn ambient(&self, n: usize) -> usize {
        self.gens().pow(n as u32)
    }

    /// R_n = Σ V^{⊗i} R V^{⊗(n-2-i)} inside V^{⊗n}.
    pub fn relation_space(&self, n: usize) -> Result<Subspace, NcError> {
        if n < 2 {
            return Err(NcError::DegreeTooSmall(n));
        }
        Ok(Subspace::from_vectors(self.relation_vectors(n), self.ambient(n)))
    }

    /// dim A_n.
    pub fn hilbert_dim(&self, n: usize) -> usize {
        match n {
            0 => 1,
            1 => self.gens(),
            _ => self.ambient(n) - span::rank(self.relation_vectors(n), self.ambient(n)),
        }
    }

    pub fn hilbert_dims(&self, nmax: usize) -> Vec<usize> {
        (0..=nmax).map(|n| self.hilbert_dim(n)).collect()
    }

    /// Whether `z` vanishes in `A / (extra)`.
    pub fn is_zero_in_quotient(&self, z: &NcTensor, extra: &[NcTensor]) -> Result<bool, NcError> {
        let n = z.degree();
        if z.gens() != self.gens() {
            return Err(NcError::GeneratorMismatch {
                expected: self.gens(),
                found: z.gens(),
            });
        }
        if let Some(e) = extra.iter().find(|e| e.degree() > n) {
            return Err(NcError::DegreeMismatch {
                expected: n,
                found: e.degree(),
            });
        }
        if z.is_zero() {
            return Ok(true);
        }
        let mut gens = self.relation_vectors(n);
        gens.extend(self.padded(extra, n));
        Ok(span::membership(gens, vec![z.to_sparse()], self.ambient(n))[0])
    }

    /// Whether `z` commutes with every generator modulo the relations and
    /// the two-sided ideal generated by `modulo`.
    pub fn is_central(&self, z: &NcTensor, modulo: &[NcTensor]) -> bool {
        let n = z.degree() + 1;
        let mut gens = self.relation_vectors(n);
        gens.extend(self.padded(modulo, n));
        let targets: Vec<SparseVec<FieldElem>> = (0..self.gens())
            .map(|j| {
                let x = self.generator(j);
                z.tensor(&x).sub(&x.tensor(z)).to_sparse()
            })
            .collect();
        span::membership(gens, targets, self.ambient(n)).into_iter().all(|b| b)
    }

    /// dim (A / A·W)_n for n = 0..=nmax, W a set of linear forms.
    pub fn left_quotient_dims(&self, forms: &[NcTensor], nmax: usize) -> Result<Vec<usize>, NcError> {
        if let Some(f) = forms.iter().find(|f| f.degree() != 1) {
            return Err(NcError::DegreeMismatch {
                expected: 1,
                found: f.degree(),
            });
        }
        let g = self.gens();
        let fvecs: Vec<SparseVec<FieldElem>> = forms.iter().map(NcTensor::to_sparse).collect();
        if span::rank(fvecs.clone(), g) != forms.len() {
            return Err(NcError::DependentForms);
        }
        let mut dims = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let d = match n {
                0 => 1,
                1 => g - forms.len(),
                _ => {
                    let mut gens = self.relation_vectors(n);
                    let gp = g.pow((n - 1) as u32);
                    for p in 0..gp {
                        for f in &fvecs {
                            gens.push(f.iter().map(|(i, c)| (p * g + i, c.clone())).collect());
                        }
                    }
                    self.ambient(n) - span::rank(gens, self.ambient(n))
                }
            };
            dims.push(d);
        }
        Ok(dims)
    }

    /// dim (A / (Z))_n for n = 0..=nmax, each z ∈ Z central of degree two.
    pub fn two_sided_quotient_dims(&self, central: &[NcTensor], nmax: usize) -> Result<Vec<usize>, NcError> {
        for (k, z) in central.iter().enumerate() {
            if z.degree() != 2 || !self.is_central(z, &[]) {
                return Err(NcError::NotCentral(k));
            }
        }
        Ok((0..=nmax)
            .map(|n| match n {
                0 => 1,
                1 => self.gens(),
                _ => {
                    let mut gens = self.relation_vectors(n);
                    gens.extend(self.padded(central, n));
                    self.ambient(n) - span::rank(gens, self.ambient(n))
                }
            })
            .collect())
    }

    /// The quadratic dual A^!: dual generators with relations R^⊥.
    pub fn koszul_dual(&self) -> QuadAlgebra {
        let g = self.gens();
        let perp = span::orthogonal_complement(self.relations.iter().map(NcTensor::to_sparse).collect(), g * g);
        let relations: Vec<NcTensor> = perp.iter().map(|v| NcTensor::from_sparse(g, 2, v)).collect();
        let labels = self.labels.iter().map(|l| format!("{l}*")).collect();
        QuadAlgebra {
            labels,
            relations,
            tower: self.tower.clone(),
        }
    }

    /// Span of the relations in V^{⊗2}.
    pub fn relation_span(&self) -> Subspace {
        let g = self.gens();
        Subspace::from_vectors(self.relations.iter().map(NcTensor::to_sparse).collect(), g * g)
    }

    pub fn same_relations(&self, other: &QuadAlgebra) -> bool {
        self.gens() == other.gens() && self.relation_span().same_span(&other.relation_span())
    }

    /// Whether the substitution `x_j ↦ images[j]` maps the relation span into itself.
    pub fn preserves_relations(&self, images: &[NcTensor], reverse: bool) -> bool {
        let span = self.relation_span();
        self.relations.iter().all(|r| {
            let mut t = r.substitute(images);
            if reverse {
                t = t.reversed();
            }
            span.contains(&t.to_sparse())
        })
    }

    /// The matrix of linear forms M with M(u)·v = (r_k(u, v))_k.
    pub fn multilinearize(&self) -> RelationMatrix {
        let g = self.gens();
        let entries = self
            .relations
            .iter()
            .map(|r| {
                (0..g)
                    .map(|j| {
                        let mut form = NcTensor::zero(g, 1);
                        for (w, c) in r.terms() {
                            if w[1] as usize == j {
                                form.add_term(vec![w[0]], c.clone());
                            }
                        }
                        form
                    })
                    .collect()
            })
            .collect();
        RelationMatrix { gens: g, entries }
    }
}

/// An r × g matrix of linear forms obtained from quadratic relations.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationMatrix {
    pub gens: usize,
    pub entries: Vec<Vec<NcTensor>>,
}

impl RelationMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.gens
    }

    /// Evaluate every entry at the point `u`.
    pub fn eval(&self, u: &[FieldElem]) -> Matrix<FieldElem> {
        assert_eq!(u.len(), self.gens);
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|f| f.eval_multilinear(&[u])).collect())
            .collect();
        Matrix::from_rows(rows)
    }

    /// The linear form in row `k`, column `j`, as coefficients of x_0..x_{g-1}.
    pub fn form_coeffs(&self, k: usize, j: usize, tower: &TowerField) -> Vec<FieldElem> {
        (0..self.gens)
            .map(|i| {
                self.entries[k][j]
                    .coeff(&[i as u8])
                    .cloned()
                    .unwrap_or_else(|| tower.zero())
            })
            .collect()
    }
}
