//! Spreading-signature and pilot books: orthogonal (Hadamard/DFT), random
//! ±1, and sparse single-tone sets, plus the UE-to-signature assignment.
//!
//! Every vector in a book has squared norm equal to its length `N`, so the
//! per-symbol transmit power is independent of the signature kind. The same
//! type doubles as the pilot book, with `N = tau_p`.

use rand::Rng;

use crate::linalg::{C64, CVec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureKind {
    /// Mutually orthogonal book: Hadamard for power-of-two lengths (exact
    /// ±1 entries), DFT columns otherwise. At most `N` distinct vectors.
    Orthogonal,
    /// Independent uniform ±1 entries per vector.
    RandomPm1,
    /// One non-zero entry of value `sqrt(N)` at a random position.
    Sparse,
}

/// A book of spreading (or pilot) vectors together with the map from flat
/// UE index `l * K + k` to the vector each UE transmits.
#[derive(Debug, Clone)]
pub struct SignatureSet {
    vectors: Vec<CVec>,
    kind: SignatureKind,
    assignment: Vec<usize>,
    length: usize,
}

impl SignatureSet {
    /// The full orthogonal book of `n` vectors of length `n`. For `n` a
    /// power of two this is the ±1 Hadamard book (so `n = 2` gives exactly
    /// `{[1, 1], [1, -1]}`); otherwise the DFT book.
    pub fn orthogonal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("signature length must be at least 1"));
        }
        let vectors = if n.is_power_of_two() {
            // Sylvester construction: entry (k, m) is -1^(popcount(k & m))
            (0..n)
                .map(|k| {
                    CVec::from_fn(n, |m, _| {
                        let sign = if (k & m).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        C64::new(sign, 0.0)
                    })
                })
                .collect()
        } else {
            (0..n)
                .map(|k| {
                    CVec::from_fn(n, |m, _| {
                        C64::from_polar(1.0, -std::f64::consts::TAU * (k * m) as f64 / n as f64)
                    })
                })
                .collect()
        };
        Ok(SignatureSet { vectors, kind: SignatureKind::Orthogonal, assignment: Vec::new(), length: n })
    }

    /// `count` independent random ±1 vectors of length `n`, one per UE
    /// (identity assignment).
    pub fn random_pm1<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || count == 0 {
            return Err(Error::config("need n >= 1 and count >= 1"));
        }
        let vectors = (0..count)
            .map(|_| {
                CVec::from_fn(n, |_, _| {
                    C64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
                })
            })
            .collect();
        Ok(SignatureSet {
            vectors,
            kind: SignatureKind::RandomPm1,
            assignment: (0..count).collect(),
            length: n,
        })
    }

    /// `count` sparse vectors of length `n`: a single entry of value
    /// `sqrt(n)` at a uniformly random position (identity assignment).
    pub fn sparse<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || count == 0 {
            return Err(Error::config("need n >= 1 and count >= 1"));
        }
        let amp = (n as f64).sqrt();
        let vectors = (0..count)
            .map(|_| {
                let pos = rng.gen_range(0..n);
                CVec::from_fn(n, |i, _| {
                    if i == pos { C64::new(amp, 0.0) } else { C64::new(0.0, 0.0) }
                })
            })
            .collect();
        Ok(SignatureSet {
            vectors,
            kind: SignatureKind::Sparse,
            assignment: (0..count).collect(),
            length: n,
        })
    }

    /// Signature length N (or pilot length tau_p).
    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn kind(&self) -> SignatureKind {
        self.kind
    }

    pub fn num_vectors(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, idx: usize) -> &CVec {
        &self.vectors[idx]
    }

    /// Flat-UE to vector-index map; empty until an `assign_*` call (except
    /// for the random/sparse books, which start with one vector per UE).
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of UEs covered by the assignment.
    pub fn assigned_ues(&self) -> usize {
        self.assignment.len()
    }

    /// Vector transmitted by flat UE `t`.
    pub fn signature_of(&self, t: usize) -> &CVec {
        &self.vectors[self.assignment[t]]
    }

    pub fn vector_index_of(&self, t: usize) -> usize {
        self.assignment[t]
    }

    /// Every UE its own vector; requires as many vectors as UEs.
    pub fn assign_identity(mut self, total_ues: usize) -> Result<Self> {
        if total_ues != self.vectors.len() {
            return Err(Error::config(format!(
                "identity assignment needs one vector per UE: {} vectors, {} UEs",
                self.vectors.len(),
                total_ues
            )));
        }
        self.assignment = (0..total_ues).collect();
        Ok(self)
    }

    /// In-cell index modulo book size, the same pattern in every cell:
    /// UE (l, k) gets vector `k % num_vectors`.
    pub fn assign_cyclic(mut self, cells: usize, ues_per_cell: usize) -> Result<Self> {
        if self.vectors.is_empty() {
            return Err(Error::config("cannot assign from an empty book"));
        }
        let n = self.vectors.len();
        self.assignment = (0..cells * ues_per_cell)
            .map(|t| (t % ues_per_cell) % n)
            .collect();
        Ok(self)
    }

    /// Uniformly random vector per UE.
    pub fn assign_random<R: Rng + ?Sized>(mut self, total_ues: usize, rng: &mut R) -> Result<Self> {
        if self.vectors.is_empty() {
            return Err(Error::config("cannot assign from an empty book"));
        }
        let n = self.vectors.len();
        self.assignment = (0..total_ues).map(|_| rng.gen_range(0..n)).collect();
        Ok(self)
    }

    /// Round-robin within each group: the members of a group (sorted by
    /// flat index) get vectors `0, 1, 2, ...` in turn, so groups of at most
    /// `num_vectors` UEs are internally collision-free. `groups` must
    /// partition `0..total_ues`.
    pub fn assign_grouped(mut self, groups: &[Vec<usize>], total_ues: usize) -> Result<Self> {
        if self.vectors.is_empty() {
            return Err(Error::config("cannot assign from an empty book"));
        }
        let n = self.vectors.len();
        let mut assignment = vec![usize::MAX; total_ues];
        let mut seen = 0usize;
        for group in groups {
            let mut members = group.clone();
            members.sort_unstable();
            for (q, &t) in members.iter().enumerate() {
                if t >= total_ues || assignment[t] != usize::MAX {
                    return Err(Error::config(format!(
                        "groups must partition 0..{total_ues}: UE {t} repeated or out of range"
                    )));
                }
                assignment[t] = q % n;
                seen += 1;
            }
        }
        if seen != total_ues {
            return Err(Error::config(format!(
                "groups must cover every UE: covered {seen} of {total_ues}"
            )));
        }
        self.assignment = assignment;
        Ok(self)
    }

    /// Flat indices of the UEs sharing UE `t`'s vector. `include_self`
    /// keeps `t` itself in the list (callers that sum interference over the
    /// co-signature set want it; callers enumerating partners do not).
    pub fn co_signature_index(&self, t: usize, include_self: bool) -> Vec<usize> {
        let idx = self.assignment[t];
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(u, &v)| v == idx && (include_self || u != t))
            .map(|(u, _)| u)
            .collect()
    }

    /// UE lists per vector index (empty lists for unused vectors).
    pub fn ues_by_vector(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vectors.len()];
        for (t, &v) in self.assignment.iter().enumerate() {
            out[v].push(t);
        }
        out
    }

    /// True when every pair of *distinct vectors in the book* is orthogonal
    /// within `tol * N` (vector reuse across UEs does not break
    /// orthogonality).
    pub fn is_mutually_orthogonal(&self, tol: f64) -> bool {
        for a in 0..self.vectors.len() {
            for b in (a + 1)..self.vectors.len() {
                if self.vectors[a].dotc(&self.vectors[b]).norm() > tol * self.length as f64 {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_orthogonal_n2_is_hadamard() {
        let s = SignatureSet::orthogonal(2).unwrap();
        assert_eq!(s.num_vectors(), 2);
        assert_eq!(s.vector(0)[0], C64::new(1.0, 0.0));
        assert_eq!(s.vector(0)[1], C64::new(1.0, 0.0));
        assert_eq!(s.vector(1)[0], C64::new(1.0, 0.0));
        assert_eq!(s.vector(1)[1], C64::new(-1.0, 0.0));
    }

    #[test]
    fn test_orthogonal_books_are_orthogonal() {
        for &n in &[1usize, 2, 3, 4, 5, 8, 12, 16, 32] {
            let s = SignatureSet::orthogonal(n).unwrap();
            assert_eq!(s.num_vectors(), n);
            assert!(s.is_mutually_orthogonal(1e-12), "book N = {n} not orthogonal");
            for k in 0..n {
                assert_relative_eq!(s.vector(k).norm_squared(), n as f64, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn test_random_pm1_norms_and_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SignatureSet::random_pm1(8, 40, &mut rng).unwrap();
        assert_eq!(s.num_vectors(), 40);
        assert_eq!(s.assigned_ues(), 40);
        for k in 0..40 {
            assert_relative_eq!(s.vector(k).norm_squared(), 8.0);
            for i in 0..8 {
                assert!(s.vector(k)[i].re.abs() == 1.0 && s.vector(k)[i].im == 0.0);
            }
        }
        // deterministic under the same seed
        let mut rng2 = ChaCha8Rng::seed_from_u64(1);
        let s2 = SignatureSet::random_pm1(8, 40, &mut rng2).unwrap();
        for k in 0..40 {
            assert_eq!(s.vector(k), s2.vector(k));
        }
    }

    #[test]
    fn test_sparse_single_tone() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SignatureSet::sparse(4, 100, &mut rng).unwrap();
        let mut position_seen = [false; 4];
        for k in 0..100 {
            let v = s.vector(k);
            assert_relative_eq!(v.norm_squared(), 4.0);
            let nonzero: Vec<usize> = (0..4).filter(|&i| v[i].norm() > 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_relative_eq!(v[nonzero[0]].re, 2.0);
            position_seen[nonzero[0]] = true;
        }
        assert!(position_seen.iter().all(|&b| b), "positions not uniformly explored");
    }

    #[test]
    fn test_cyclic_assignment_repeats_across_cells() {
        let s = SignatureSet::orthogonal(4).unwrap().assign_cyclic(2, 8).unwrap();
        for l in 0..2 {
            for k in 0..8 {
                assert_eq!(s.vector_index_of(l * 8 + k), k % 4);
            }
        }
        // UE 1 of each cell shares vector 1
        let partners = s.co_signature_index(1, true);
        assert_eq!(partners, vec![1, 5, 9, 13]);
        let partners_noself = s.co_signature_index(1, false);
        assert_eq!(partners_noself, vec![5, 9, 13]);
    }

    #[test]
    fn test_grouped_assignment_collision_free_within_group() {
        let s = SignatureSet::orthogonal(4).unwrap();
        let groups = vec![vec![0usize, 2, 4, 6], vec![7, 5, 3, 1]];
        let s = s.assign_grouped(&groups, 8).unwrap();
        // sorted members get 0, 1, 2, 3 in turn
        assert_eq!(s.vector_index_of(0), 0);
        assert_eq!(s.vector_index_of(2), 1);
        assert_eq!(s.vector_index_of(4), 2);
        assert_eq!(s.vector_index_of(6), 3);
        assert_eq!(s.vector_index_of(1), 0);
        assert_eq!(s.vector_index_of(3), 1);
        for g in &groups {
            let mut idx: Vec<usize> = g.iter().map(|&t| s.vector_index_of(t)).collect();
            idx.sort_unstable();
            idx.dedup();
            assert_eq!(idx.len(), 4, "collision inside a group");
        }
        // non-partition input is rejected
        let bad = vec![vec![0usize, 1], vec![1, 2, 3, 4, 5, 6, 7]];
        assert!(SignatureSet::orthogonal(4).unwrap().assign_grouped(&bad, 8).is_err());
    }

    #[test]
    fn test_random_assignment_deterministic() {
        let s1 = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            SignatureSet::orthogonal(4).unwrap().assign_random(16, &mut rng).unwrap()
        };
        let s2 = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            SignatureSet::orthogonal(4).unwrap().assign_random(16, &mut rng).unwrap()
        };
        assert_eq!(s1.assignment(), s2.assignment());
        assert!(s1.assignment().iter().all(|&v| v < 4));
    }

    #[test]
    fn test_mutual_orthogonality_detects_collisions_only_between_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = SignatureSet::random_pm1(4, 30, &mut rng).unwrap();
        // 30 random ±1 vectors of length 4 cannot all be orthogonal
        assert!(!r.is_mutually_orthogonal(1e-12));
        // a reused orthogonal book stays orthogonal
        let o = SignatureSet::orthogonal(4).unwrap().assign_cyclic(4, 8).unwrap();
        assert!(o.is_mutually_orthogonal(1e-12));
    }

    #[test]
    fn test_ues_by_vector_partitions() {
        let s = SignatureSet::orthogonal(4).unwrap().assign_cyclic(2, 8).unwrap();
        let by = s.ues_by_vector();
        assert_eq!(by.len(), 4);
        let mut all: Vec<usize> = by.concat();
        all.sort_unstable();
        assert_eq!(all, (0..16).collect::<Vec<_>>());
    }
}
