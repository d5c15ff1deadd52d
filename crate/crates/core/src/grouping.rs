//! Statistical UE grouping on the Grassmann manifold.
//!
//! Each UE is summarized by the p-dominant eigenspace of its spatial
//! correlation matrix; distances between UEs are squared projection
//! (chordal) distances between those subspaces. Grouping is subspace
//! k-means — the exact cost-minimizing center of a group is the
//! p-dominant eigenspace of the summed projectors, so both k-means steps
//! are monotone — with an optional balanced variant that forces equal
//! group sizes through an optimal assignment (Hungarian) step.

use crate::channel::CorrelationMatrix;
use crate::linalg::{self, CMat};
use crate::{Error, Result};
use rand::Rng;

/// Orthonormal basis of a p-dimensional subspace of C^M (columns).
#[derive(Debug, Clone)]
pub struct Eigenspace {
    u: CMat,
}

impl Eigenspace {
    /// Wraps a basis matrix, verifying `U^H U = I` to within 1e-10.
    pub fn new(u: CMat) -> Result<Self> {
        if u.ncols() == 0 || u.nrows() < u.ncols() {
            return Err(Error::config(format!(
                "basis must be tall with at least one column, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let gram = u.adjoint() * &u;
        let defect = (&gram - CMat::identity(u.ncols(), u.ncols()))
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if defect > 1e-10 {
            return Err(Error::numerical(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Eigenspace { u })
    }

    pub fn matrix(&self) -> &CMat {
        &self.u
    }

    /// Ambient dimension M.
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Subspace dimension p.
    pub fn subspace_dim(&self) -> usize {
        self.u.ncols()
    }
}

/// Orthonormal basis of the p-dominant eigenspace of a Hermitian matrix,
/// with a deterministic phase convention: each column is rotated so its
/// largest-magnitude entry (lowest index on ties) is real and positive.
/// When the p-th and (p+1)-th eigenvalues coincide the subspace is not
/// unique; the returned basis is still deterministic for identical input.
pub fn p_dominant_eigenspace(a: &CMat, p: usize) -> Result<Eigenspace> {
    if a.nrows() != a.ncols() {
        return Err(Error::config(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    let m = a.nrows();
    if p < 1 || p > m {
        return Err(Error::config(format!("subspace dimension {p} out of range 1..={m}")));
    }
    let scale = a.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if linalg::hermitian_defect(a) > 1e-12 * scale.max(1.0) {
        return Err(Error::numerical("matrix is not Hermitian"));
    }
    let (_, vecs) = linalg::eigh_desc(a);
    let mut u = vecs.columns(0, p).into_owned();
    for mut col in u.column_iter_mut() {
        let mut best = 0usize;
        let mut best_mag = -1.0f64;
        for (i, c) in col.iter().enumerate() {
            if c.norm() > best_mag {
                best_mag = c.norm();
                best = i;
            }
        }
        let pivot = col[best];
        if pivot.norm() > 0.0 {
            let rot = pivot.conj() / pivot.norm();
            for c in col.iter_mut() {
                *c *= rot;
            }
        }
    }
    Eigenspace::new(u)
}

/// Squared projection distance `||A A^H - B B^H||_F^2 = 2(p - ||A^H B||_F^2)`,
/// clamped at zero against rounding. Requires equal ambient and subspace
/// dimensions.
pub fn chordal_distance_sq(a: &Eigenspace, b: &Eigenspace) -> Result<f64> {
    if a.dim() != b.dim() || a.subspace_dim() != b.subspace_dim() {
        return Err(Error::config(format!(
            "subspace shape mismatch: {}x{} vs {}x{}",
            a.dim(),
            a.subspace_dim(),
            b.dim(),
            b.subspace_dim()
        )));
    }
    let cross = a.u.adjoint() * &b.u;
    let p = a.subspace_dim() as f64;
    Ok((2.0 * (p - cross.norm_squared())).max(0.0))
}

/// Projection (chordal) distance between subspaces: the square root of
/// [`chordal_distance_sq`].
pub fn chordal_distance(a: &Eigenspace, b: &Eigenspace) -> Result<f64> {
    Ok(chordal_distance_sq(a, b)?.sqrt())
}

/// Result of a grouping run. `membership[t]` is the group of UE `t`;
/// `groups[g]` lists its members in ascending order; `total_cost` is the
/// sum of squared chordal distances to the final centers.
#[derive(Debug, Clone)]
pub struct GroupAssignment {
    pub groups: Vec<Vec<usize>>,
    pub centers: Vec<Eigenspace>,
    pub membership: Vec<usize>,
    pub total_cost: f64,
}

fn spaces_from_corr(corr: &[CorrelationMatrix], subspace_dim: usize) -> Result<Vec<Eigenspace>> {
    corr.iter().map(|r| p_dominant_eigenspace(r.matrix(), subspace_dim)).collect()
}

fn check_space_shapes(spaces: &[Eigenspace]) -> Result<(usize, usize)> {
    let m = spaces[0].dim();
    let p = spaces[0].subspace_dim();
    for (t, s) in spaces.iter().enumerate() {
        if s.dim() != m || s.subspace_dim() != p {
            return Err(Error::config(format!(
                "UE {t} has subspace shape {}x{}, expected {m}x{p}",
                s.dim(),
                s.subspace_dim()
            )));
        }
    }
    Ok((m, p))
}

/// Exact cost-minimizing center of a member set: the p-dominant
/// eigenspace of the summed projectors `sum_t U_t U_t^H`.
fn group_center(spaces: &[Eigenspace], members: &[usize], m: usize, p: usize) -> Result<Eigenspace> {
    let mut s = CMat::zeros(m, m);
    for &t in members {
        let u = spaces[t].matrix();
        s += u * u.adjoint();
    }
    p_dominant_eigenspace(&linalg::hermitize(&s), p)
}

fn nearest_center(space: &Eigenspace, centers: &[Eigenspace]) -> Result<(usize, f64)> {
    let mut best = (0usize, f64::INFINITY);
    for (g, c) in centers.iter().enumerate() {
        let d = chordal_distance_sq(space, c)?;
        if d < best.1 {
            best = (g, d);
        }
    }
    Ok(best)
}

fn finish_assignment(
    spaces: &[Eigenspace],
    membership: Vec<usize>,
    centers: Vec<Eigenspace>,
    groups_count: usize,
) -> Result<GroupAssignment> {
    let mut groups = vec![Vec::new(); groups_count];
    for (t, &g) in membership.iter().enumerate() {
        groups[g].push(t);
    }
    let mut total_cost = 0.0;
    for (t, &g) in membership.iter().enumerate() {
        total_cost += chordal_distance_sq(&spaces[t], &centers[g])?;
    }
    Ok(GroupAssignment { groups, centers, membership, total_cost })
}

/// Subspace k-means over UE eigenspaces with k-means++ seeding: the first
/// center is a uniformly random UE and each further center is drawn with
/// probability proportional to the squared chordal distance from its
/// nearest chosen center, which tends to place one seed per cluster when
/// the clusters are separated. Ties in the assignment step go to the
/// lowest group index; a group left empty is reseeded with the UE
/// currently farthest from its own center (among groups that can spare a
/// member). Deterministic for a given RNG seed.
pub fn kmeans_group_spaces(
    spaces: &[Eigenspace],
    groups: usize,
    rng: &mut impl Rng,
    max_iter: usize,
) -> Result<GroupAssignment> {
    if spaces.is_empty() {
        return Err(Error::config("no UEs to group"));
    }
    if groups < 1 || groups > spaces.len() {
        return Err(Error::config(format!(
            "group count {groups} out of range 1..={}",
            spaces.len()
        )));
    }
    let (m, p) = check_space_shapes(spaces)?;
    let first = rng.gen_range(0..spaces.len());
    let mut centers: Vec<Eigenspace> = vec![spaces[first].clone()];
    let mut nearest: Vec<f64> = spaces
        .iter()
        .map(|s| chordal_distance_sq(s, &centers[0]))
        .collect::<Result<_>>()?;
    while centers.len() < groups {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut ticket = rng.gen::<f64>() * total;
            let mut chosen = spaces.len() - 1;
            for (t, &d) in nearest.iter().enumerate() {
                ticket -= d;
                if ticket <= 0.0 {
                    chosen = t;
                    break;
                }
            }
            chosen
        } else {
            // every UE coincides with a chosen center; any seed works
            centers.len() - 1
        };
        centers.push(spaces[next].clone());
        for (t, s) in spaces.iter().enumerate() {
            nearest[t] = nearest[t].min(chordal_distance_sq(s, centers.last().unwrap())?);
        }
    }
    let mut membership = vec![usize::MAX; spaces.len()];
    for iter in 0..max_iter.max(1) {
        // assignment step
        let mut next = Vec::with_capacity(spaces.len());
        let mut dist = Vec::with_capacity(spaces.len());
        for s in spaces {
            let (g, d) = nearest_center(s, &centers)?;
            next.push(g);
            dist.push(d);
        }
        // reseed any empty group from the farthest UE of a group with >= 2 members
        let mut sizes = vec![0usize; groups];
        for &g in &next {
            sizes[g] += 1;
        }
        for g in 0..groups {
            while sizes[g] == 0 {
                let far = (0..spaces.len())
                    .filter(|&t| sizes[next[t]] >= 2)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]))
                    .ok_or_else(|| {
                        Error::config("cannot reseed an empty group: no group can spare a UE")
                    })?;
                sizes[next[far]] -= 1;
                next[far] = g;
                sizes[g] += 1;
                dist[far] = 0.0;
                centers[g] = spaces[far].clone();
            }
        }
        let converged = next == membership;
        membership = next;
        // center step: exact minimizer per group
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); groups];
        for (t, &g) in membership.iter().enumerate() {
            members[g].push(t);
        }
        for g in 0..groups {
            centers[g] = group_center(spaces, &members[g], m, p)?;
        }
        if converged && iter > 0 {
            break;
        }
    }
    finish_assignment(spaces, membership, centers, groups)
}

/// [`kmeans_group_spaces`] starting from correlation matrices: UEs are
/// first reduced to the `subspace_dim`-dominant eigenspaces.
pub fn kmeans_group(
    corr: &[CorrelationMatrix],
    groups: usize,
    subspace_dim: usize,
    rng: &mut impl Rng,
    max_iter: usize,
) -> Result<GroupAssignment> {
    kmeans_group_spaces(&spaces_from_corr(corr, subspace_dim)?, groups, rng, max_iter)
}

/// Balanced subspace grouping: k-means centers, then groups of exactly
/// `K / G` UEs chosen by a minimum-cost assignment (Hungarian) against the
/// centers, alternating with exact center updates until the cost stops
/// improving. Requires the group count to divide the UE count.
pub fn balanced_group_spaces(
    spaces: &[Eigenspace],
    groups: usize,
    rng: &mut impl Rng,
    max_iter: usize,
) -> Result<GroupAssignment> {
    if spaces.is_empty() {
        return Err(Error::config("no UEs to group"));
    }
    if groups < 1 || !spaces.len().is_multiple_of(groups) {
        return Err(Error::config(format!(
            "group count {groups} must divide the UE count {}",
            spaces.len()
        )));
    }
    let (m, p) = check_space_shapes(spaces)?;
    let per_group = spaces.len() / groups;
    let seed = kmeans_group_spaces(spaces, groups, rng, max_iter)?;
    let mut centers = seed.centers;
    let mut best: Option<GroupAssignment> = None;
    for _ in 0..max_iter.max(1) {
        // distance rows per center, replicated per_group times: slot
        // r = g * per_group + q holds group g's distances to every UE
        let mut cost = vec![vec![0.0f64; spaces.len()]; spaces.len()];
        for g in 0..groups {
            let mut row = Vec::with_capacity(spaces.len());
            for s in spaces {
                row.push(chordal_distance_sq(s, &centers[g])?);
            }
            for q in 0..per_group {
                cost[g * per_group + q].clone_from(&row);
            }
        }
        let slot_of = hungarian_solve(&cost)?;
        let mut membership = vec![0usize; spaces.len()];
        for (r, &t) in slot_of.iter().enumerate() {
            membership[t] = r / per_group;
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); groups];
        for (t, &g) in membership.iter().enumerate() {
            members[g].push(t);
        }
        for g in 0..groups {
            centers[g] = group_center(spaces, &members[g], m, p)?;
        }
        let cand = finish_assignment(spaces, membership, centers.clone(), groups)?;
        match &best {
            Some(b) if cand.total_cost >= b.total_cost - 1e-12 => {
                break;
            }
            _ => best = Some(cand),
        }
    }
    Ok(best.expect("at least one balanced assignment is produced"))
}

/// [`balanced_group_spaces`] starting from correlation matrices.
pub fn balanced_group(
    corr: &[CorrelationMatrix],
    groups: usize,
    subspace_dim: usize,
    rng: &mut impl Rng,
    max_iter: usize,
) -> Result<GroupAssignment> {
    balanced_group_spaces(&spaces_from_corr(corr, subspace_dim)?, groups, rng, max_iter)
}

/// Offline mode: assign each UE to its nearest center from a previous
/// run, without moving the centers. Groups may come out empty.
pub fn assign_to_centers(
    centers: &[Eigenspace],
    spaces: &[Eigenspace],
) -> Result<GroupAssignment> {
    if centers.is_empty() || spaces.is_empty() {
        return Err(Error::config("need at least one center and one UE"));
    }
    check_space_shapes(spaces)?;
    check_space_shapes(centers)?;
    if centers[0].dim() != spaces[0].dim()
        || centers[0].subspace_dim() != spaces[0].subspace_dim()
    {
        return Err(Error::config("centers and UE subspaces have different shapes"));
    }
    let mut membership = Vec::with_capacity(spaces.len());
    for s in spaces {
        membership.push(nearest_center(s, centers)?.0);
    }
    finish_assignment(spaces, membership, centers.to_vec(), centers.len())
}

/// Minimum-cost perfect assignment of `n` rows to `n >= rows` columns
/// (potentials / shortest-augmenting-path formulation, O(n^2 m)).
/// Returns the column matched to each row. Costs must be finite.
pub fn hungarian_solve(cost: &[Vec<f64>]) -> Result<Vec<usize>> {
    let n = cost.len();
    if n == 0 {
        return Err(Error::config("empty cost matrix"));
    }
    let m = cost[0].len();
    if m < n {
        return Err(Error::config(format!(
            "need at least as many columns as rows, got {n}x{m}"
        )));
    }
    for row in cost {
        if row.len() != m {
            return Err(Error::config("cost matrix rows have unequal lengths"));
        }
        if row.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("cost matrix entries must be finite"));
        }
    }
    // 1-indexed potentials formulation; p[j] = row matched to column j
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    Ok(ans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::corr_2d_one_ring;
    use crate::linalg::C64;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(entries: &[f64]) -> CMat {
        CMat::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn test_p_dominant_eigenspace_diagonal() {
        let a = diag(&[3.0, 1.0, 2.0]);
        let e = p_dominant_eigenspace(&a, 2).unwrap();
        // dominant directions: e0 (eigenvalue 3) and e2 (eigenvalue 2),
        // phase-fixed to +1 pivots
        assert_relative_eq!(e.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.matrix()[(2, 1)].re, 1.0, epsilon = 1e-12);
        assert!(e.matrix()[(1, 0)].norm() < 1e-12);
        assert!(e.matrix()[(1, 1)].norm() < 1e-12);
        assert!(p_dominant_eigenspace(&a, 0).is_err());
        assert!(p_dominant_eigenspace(&a, 4).is_err());
    }

    #[test]
    fn test_phase_fix_is_deterministic() {
        let r = corr_2d_one_ring(6, 1.0, 0.4, 0.1).unwrap();
        let a = p_dominant_eigenspace(r.matrix(), 3).unwrap();
        let b = p_dominant_eigenspace(r.matrix(), 3).unwrap();
        assert_relative_eq!((a.matrix() - b.matrix()).norm(), 0.0, epsilon = 0.0);
        // pivot entries are real positive
        for col in a.matrix().column_iter() {
            let pivot = col.iter().cloned().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
            assert!(pivot.im.abs() < 1e-12 && pivot.re > 0.0);
        }
    }

    #[test]
    fn test_chordal_distance_basics() {
        let a = p_dominant_eigenspace(&diag(&[2.0, 1.0, 0.5]), 1).unwrap();
        let b = p_dominant_eigenspace(&diag(&[0.5, 2.0, 1.0]), 1).unwrap();
        // orthogonal lines: squared projection distance 2p = 2
        assert_relative_eq!(chordal_distance_sq(&a, &b).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(chordal_distance(&a, &b).unwrap(), 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(chordal_distance_sq(&a, &a).unwrap(), 0.0, epsilon = 1e-15);
        let c = p_dominant_eigenspace(&diag(&[2.0, 1.0]), 1).unwrap();
        assert!(chordal_distance_sq(&a, &c).is_err());
    }

    #[test]
    fn test_kmeans_recovers_separated_clusters() {
        // three tight azimuth clusters, far apart
        let m = 16;
        let mut corr = Vec::new();
        for (ci, center) in [-0.9f64, 0.0, 0.9].iter().enumerate() {
            for k in 0..4 {
                let az = center + 0.01 * k as f64;
                corr.push(corr_2d_one_ring(m, 1.0 + 0.1 * ci as f64, az, 0.05).unwrap());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = kmeans_group(&corr, 3, 4, &mut rng, 100).unwrap();
        // every cluster of four lands in one group
        for c in 0..3 {
            let want = g.membership[4 * c];
            for k in 0..4 {
                assert_eq!(g.membership[4 * c + k], want, "cluster {c} split: {:?}", g.membership);
            }
        }
        assert_eq!(g.groups.iter().map(Vec::len).sum::<usize>(), 12);
        // deterministic under the same seed
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let g2 = kmeans_group(&corr, 3, 4, &mut rng2, 100).unwrap();
        assert_eq!(g.membership, g2.membership);
        assert_relative_eq!(g.total_cost, g2.total_cost);
    }

    #[test]
    fn test_kmeans_cost_not_worse_than_singletons() {
        // grouping into K groups (one UE each) has zero cost; sanity-check
        // cost is finite and non-negative otherwise
        let corr: Vec<_> = (0..6)
            .map(|i| corr_2d_one_ring(8, 1.0, -0.8 + 0.3 * i as f64, 0.08).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let all = kmeans_group(&corr, 6, 2, &mut rng, 50).unwrap();
        assert!(all.total_cost < 1e-9, "singleton groups should cost ~0, got {}", all.total_cost);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let two = kmeans_group(&corr, 2, 2, &mut rng, 50).unwrap();
        assert!(two.total_cost.is_finite() && two.total_cost >= 0.0);
        assert!(two.groups.iter().all(|g| !g.is_empty()));
    }

    #[test]
    fn test_hungarian_hand_example() {
        // classic 3x3: optimum picks 1+2+1 = 4 on the anti-diagonal-ish
        let cost = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let sol = hungarian_solve(&cost).unwrap();
        let total: f64 = sol.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        assert_relative_eq!(total, 5.0, epsilon = 1e-12);
        // brute force over all permutations agrees
        let mut best = f64::INFINITY;
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            best = best.min((0..3).map(|r| cost[r][p[r]]).sum());
        }
        assert_relative_eq!(total, best, epsilon = 1e-12);
    }

    #[test]
    fn test_hungarian_rectangular_and_validation() {
        let cost = vec![vec![5.0, 1.0, 9.0], vec![4.0, 8.0, 2.0]];
        let sol = hungarian_solve(&cost).unwrap();
        assert_eq!(sol, vec![1, 2]);
        assert!(hungarian_solve(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(hungarian_solve(&[vec![1.0], vec![2.0]]).is_err()); // more rows than cols
        assert!(hungarian_solve(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn test_balanced_group_moves_excess_ue() {
        // three UEs huddle at one azimuth, one sits alone; balance forces 2+2
        let m = 12;
        let corr = vec![
            corr_2d_one_ring(m, 1.0, 0.70, 0.04).unwrap(),
            corr_2d_one_ring(m, 1.0, 0.72, 0.04).unwrap(),
            corr_2d_one_ring(m, 1.0, 0.74, 0.04).unwrap(),
            corr_2d_one_ring(m, 1.0, -0.9, 0.04).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = balanced_group(&corr, 2, 3, &mut rng, 50).unwrap();
        assert!(g.groups.iter().all(|grp| grp.len() == 2), "unbalanced: {:?}", g.groups);
        // the lonely UE 3 gets one of the huddle as partner
        let lone_group = g.membership[3];
        assert_eq!(g.groups[lone_group].len(), 2);
        // non-dividing group count rejected
        let mut rng2 = ChaCha8Rng::seed_from_u64(3);
        assert!(balanced_group(&corr, 3, 3, &mut rng2, 50).is_err());
    }

    #[test]
    fn test_assign_to_centers_offline() {
        let corr: Vec<_> = [(-0.8f64, 1.0f64), (-0.75, 0.9), (0.6, 1.1), (0.65, 1.2)]
            .iter()
            .map(|&(az, b)| corr_2d_one_ring(10, b, az, 0.05).unwrap())
            .collect();
        let spaces = spaces_from_corr(&corr, 3).unwrap();
        let centers = vec![spaces[0].clone(), spaces[2].clone()];
        let g = assign_to_centers(&centers, &spaces).unwrap();
        assert_eq!(g.membership, vec![0, 0, 1, 1]);
        assert_eq!(g.groups[0], vec![0, 1]);
        assert_eq!(g.groups[1], vec![2, 3]);
    }
}
