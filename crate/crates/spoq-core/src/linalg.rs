//! Sparse exact linear algebra over any `Scalar`: incremental row echelon
//! forms keyed by an ordered column type, normal forms modulo a span,
//! span comparison and linear dependency solving.

use std::collections::BTreeMap;

use crate::qscalars::{Scalar, ScalarError};

/// Sparse vector: ordered column -> nonzero coefficient.
pub type SparseVec<K, F> = BTreeMap<K, F>;

pub fn axpy<K: Ord + Clone, F: Scalar>(v: &mut SparseVec<K, F>, a: &F, row: &[(K, F)]) {
    if a.is_zero() {
        return;
    }
    for (k, c) in row {
        let t = a.mul(c);
        match v.get_mut(k) {
            Some(x) => {
                *x = x.add(&t);
                if x.is_zero() {
                    v.remove(k);
                }
            }
            None => {
                v.insert(k.clone(), t);
            }
        }
    }
}

pub fn add_into<K: Ord + Clone, F: Scalar>(v: &mut SparseVec<K, F>, k: K, c: F) {
    if c.is_zero() {
        return;
    }
    match v.get_mut(&k) {
        Some(x) => {
            *x = x.add(&c);
            if x.is_zero() {
                v.remove(&k);
            }
        }
        None => {
            v.insert(k, c);
        }
    }
}

pub fn map_scalars<K: Ord + Clone, F: Scalar, G: Scalar>(
    v: &SparseVec<K, F>,
    f: impl Fn(&F) -> Result<G, ScalarError>,
) -> Result<SparseVec<K, G>, ScalarError> {
    let mut out = BTreeMap::new();
    for (k, c) in v {
        let g = f(c)?;
        if !g.is_zero() {
            out.insert(k.clone(), g);
        }
    }
    Ok(out)
}

/// Row echelon form in which every stored row is monic at its largest
/// column, and pivot columns are pairwise distinct.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone, F: Scalar> {
    rows: Vec<Vec<(K, F)>>,
    pivots: BTreeMap<K, usize>,
}

impl<K: Ord + Clone, F: Scalar> Default for Echelon<K, F> {
    fn default() -> Self {
        Echelon { rows: Vec::new(), pivots: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, F: Scalar> Echelon<K, F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVec<K, F>>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.pivots.keys()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.pivots.contains_key(k)
    }

    pub fn rows(&self) -> &[Vec<(K, F)>] {
        &self.rows
    }

    /// Remainder of `v` after eliminating every pivot column. It lies in the
    /// span of the non-pivot columns and is zero iff `v` is in the row span.
    pub fn reduce(&self, mut v: SparseVec<K, F>) -> SparseVec<K, F> {
        let mut bound: Option<K> = None;
        loop {
            let next = {
                let it: Box<dyn DoubleEndedIterator<Item = (&K, &F)>> = match &bound {
                    Some(b) => Box::new(v.range(..b.clone())),
                    None => Box::new(v.iter()),
                };
                let mut found = None;
                for (k, c) in it.rev() {
                    if let Some(&r) = self.pivots.get(k) {
                        found = Some((k.clone(), c.clone(), r));
                        break;
                    }
                }
                found
            };
            match next {
                None => return v,
                Some((k, c, r)) => {
                    axpy(&mut v, &c.neg(), &self.rows[r]);
                    debug_assert!(!v.contains_key(&k));
                    bound = Some(k);
                }
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<K, F>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Add a vector; returns true if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<K, F>) -> bool {
        let v = self.reduce(v);
        let Some((k, lead)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("nonzero lead");
        let row: Vec<(K, F)> = v.into_iter().map(|(kk, c)| (kk, c.mul(&inv))).collect();
        self.pivots.insert(k, self.rows.len());
        self.rows.push(row);
        true
    }

    /// True iff both echelons span the same subspace.
    pub fn same_span(&self, other: &Echelon<K, F>) -> bool {
        self.rank() == other.rank()
            && other.rows.iter().all(|r| self.contains(&r.iter().cloned().collect()))
    }

    /// Rows of `other` not contained in this span (witnesses of a mismatch).
    pub fn missing_from(&self, other: &Echelon<K, F>) -> Vec<SparseVec<K, F>> {
        other
            .rows
            .iter()
            .map(|r| r.iter().cloned().collect::<SparseVec<K, F>>())
            .filter(|r| !self.contains(r))
            .collect()
    }

    pub fn row_vectors(&self) -> Vec<SparseVec<K, F>> {
        self.rows.iter().map(|r| r.iter().cloned().collect()).collect()
    }
}

/// Find coefficients `a` with `Σ a_k vectors[k] = target`, if any.
pub fn express<K: Ord + Clone, F: Scalar>(vectors: &[SparseVec<K, F>], target: &SparseVec<K, F>) -> Option<Vec<F>> {
    let n = vectors.len();
    // Each row carries the combination of inputs that produced it.
    type Row<K, F> = (Vec<(K, F)>, Vec<F>);
    let mut rows: Vec<Row<K, F>> = Vec::new();
    let mut pivots: BTreeMap<K, usize> = BTreeMap::new();
    let reduce = |mut v: SparseVec<K, F>, mut combo: Vec<F>, rows: &Vec<Row<K, F>>, pivots: &BTreeMap<K, usize>| {
        loop {
            let hit = v.iter().rev().find_map(|(k, c)| pivots.get(k).map(|&r| (c.clone(), r)));
            match hit {
                None => return (v, combo),
                Some((c, r)) => {
                    let a = c.neg();
                    axpy(&mut v, &a, &rows[r].0);
                    for (x, y) in combo.iter_mut().zip(rows[r].1.iter()) {
                        *x = x.add(&a.mul(y));
                    }
                }
            }
        }
    };
    for (idx, v) in vectors.iter().enumerate() {
        let mut combo = vec![F::zero(); n];
        combo[idx] = F::one();
        let (v, combo) = reduce(v.clone(), combo, &rows, &pivots);
        if let Some((k, lead)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            let inv = lead.inv().ok()?;
            let row = v.into_iter().map(|(kk, c)| (kk, c.mul(&inv))).collect();
            let combo = combo.iter().map(|c| c.mul(&inv)).collect();
            pivots.insert(k, rows.len());
            rows.push((row, combo));
        }
    }
    // reduce target, tracking negated combination
    let (rest, combo) = reduce(target.clone(), vec![F::zero(); n], &rows, &pivots);
    if rest.is_empty() {
        Some(combo.into_iter().map(|c| c.neg()).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalars::{rat, RationalFunction};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32, BigRational> {
        entries.iter().filter(|e| e.1 != 0).map(|&(k, c)| (k, rat(c, 1))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let e = Echelon::from_vectors([v(&[(0, 1), (1, 2)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (1, 3), (2, 1)])]);
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(0, 2), (1, 5), (2, 1)])));
        assert!(!e.contains(&v(&[(2, 1)])));
    }

    #[test]
    fn normal_form_avoids_pivots() {
        let e = Echelon::from_vectors([v(&[(0, 1), (3, 1)])]);
        let r = e.reduce(v(&[(3, 2)]));
        assert_eq!(r, v(&[(0, -2)]));
    }

    #[test]
    fn express_finds_combination() {
        let vs = [v(&[(0, 1)]), v(&[(1, 1)]), v(&[(0, 1), (1, 1)])];
        let t = v(&[(0, 3), (1, 4)]);
        let a = express(&vs, &t).unwrap();
        let mut acc: SparseVec<u32, BigRational> = BTreeMap::new();
        for (x, w) in a.iter().zip(vs.iter()) {
            axpy(&mut acc, x, &w.iter().map(|(k, c)| (*k, c.clone())).collect::<Vec<_>>());
        }
        assert_eq!(acc, t);
        assert!(express(&vs, &v(&[(2, 1)])).is_none());
    }

    #[test]
    fn symbolic_elimination() {
        let q = RationalFunction::q();
        let one = RationalFunction::one();
        let a: SparseVec<u32, RationalFunction> = [(0, one.clone()), (1, q.clone())].into_iter().collect();
        let b: SparseVec<u32, RationalFunction> = [(0, q.clone()), (1, q.mul(&q))].into_iter().collect();
        let e = Echelon::from_vectors([a, b]);
        assert_eq!(e.rank(), 1);
    }

    proptest! {
        #[test]
        fn span_equality_is_basis_independent(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..5),
                                              mix in prop::collection::vec(-2i64..3, 5)) {
            let vs: Vec<_> = rows.iter().map(|r| v(&r.iter().enumerate().map(|(k, c)| (k as u32, *c)).collect::<Vec<_>>())).collect();
            let e1 = Echelon::from_vectors(vs.clone());
            // add a combination to the list: span unchanged
            let mut comb: SparseVec<u32, BigRational> = BTreeMap::new();
            for (w, m) in vs.iter().zip(mix.iter()) {
                axpy(&mut comb, &rat(*m, 1), &w.iter().map(|(k, c)| (*k, c.clone())).collect::<Vec<_>>());
            }
            let mut vs2 = vs.clone();
            vs2.reverse();
            vs2.push(comb);
            let e2 = Echelon::from_vectors(vs2);
            prop_assert!(e1.same_span(&e2));
            prop_assert!(e2.same_span(&e1));
        }
    }
}
