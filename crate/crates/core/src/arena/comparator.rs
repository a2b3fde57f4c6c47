//! Approximate best halfspace in hindsight: every hyperplane through `d` data points,
//! nudged by a small margin either way, in both orientations, plus the two constants.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversaries::Halfspace;

/// Above this many `d`-subsets, a seeded sample of this size is used instead.
pub const MAX_CANDIDATE_SUBSETS: usize = 4096;

const MARGIN: f64 = 1e-9;

/// Unit normal and offset of the hyperplane through `pts`, if they are affinely independent.
fn hyperplane(pts: &[&Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let d = pts[0].len();
    let a = if d == 1 {
        vec![1.0]
    } else {
        let rows: Vec<f64> = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(pts[0]).map(|(x, y)| x - y))
            .collect();
        let m = DMatrix::from_row_slice(d - 1, d, &rows);
        // The normal spans the null space of the difference vectors.
        let svd = nalgebra::linalg::SVD::new(m.transpose() * &m, false, true);
        let vt = svd.v_t?;
        let (i, s) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let rank_ok = svd
            .singular_values
            .iter()
            .filter(|&&v| v > 1e-12 * (1.0 + s.abs()))
            .count()
            == d - 1;
        if !rank_ok {
            return None;
        }
        vt.row(i).iter().copied().collect()
    };
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= 0.0 {
        return None;
    }
    let a: Vec<f64> = a.iter().map(|v| v / norm).collect();
    let b = -a.iter().zip(pts[0]).map(|(x, y)| x * y).sum::<f64>();
    Some((a, b))
}

pub fn candidate_halfspaces(points: &[Vec<f64>], d: usize, seed: u64) -> Vec<Halfspace> {
    let zero = vec![0.0; d];
    let mut out = vec![
        Halfspace {
            a: zero.clone(),
            b: 0.0,
            flip: false,
        },
        Halfspace {
            a: zero,
            b: 0.0,
            flip: true,
        },
    ];
    if points.len() < d {
        return out;
    }
    let mut push = |pts: Vec<&Vec<f64>>| {
        if let Some((a, b)) = hyperplane(&pts) {
            let neg: Vec<f64> = a.iter().map(|v| -v).collect();
            for shift in [MARGIN, -MARGIN] {
                out.push(Halfspace {
                    a: a.clone(),
                    b: b + shift,
                    flip: false,
                });
                out.push(Halfspace {
                    a: neg.clone(),
                    b: -b + shift,
                    flip: false,
                });
            }
        }
    };
    let total = binomial(points.len(), d);
    if total.is_some_and(|c| c <= MAX_CANDIDATE_SUBSETS) {
        for combo in points.iter().combinations(d) {
            push(combo);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_CANDIDATE_SUBSETS {
            let idx = sample(&mut rng, points.len(), d);
            push(idx.iter().map(|i| &points[i]).collect());
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// Loss of each candidate on a labeled sequence.
pub fn halfspace_losses(cands: &[Halfspace], data: &[(Vec<f64>, bool)]) -> Vec<u64> {
    cands
        .iter()
        .map(|h| data.iter().filter(|(x, y)| h.label(x) != *y).count() as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_data_has_a_zero_loss_candidate() {
        let data = vec![
            (vec![0.0, 0.0], true),
            (vec![1.0, 0.2], true),
            (vec![0.0, 1.0], false),
            (vec![1.0, 1.5], false),
            (vec![0.5, 0.9], false),
        ];
        let pts: Vec<Vec<f64>> = data.iter().map(|p| p.0.clone()).collect();
        let c = candidate_halfspaces(&pts, 2, 0);
        assert_eq!(*halfspace_losses(&c, &data).iter().min().unwrap(), 0);
    }

    #[test]
    fn constants_are_always_candidates() {
        let c = candidate_halfspaces(&[], 3, 0);
        let data = vec![(vec![1.0, 2.0, 3.0], false)];
        assert_eq!(halfspace_losses(&c, &data), vec![1, 0]);
    }

    #[test]
    fn one_dimensional_thresholds() {
        let data: Vec<(Vec<f64>, bool)> = (0..6).map(|i| (vec![i as f64], i >= 3)).collect();
        let pts: Vec<Vec<f64>> = data.iter().map(|p| p.0.clone()).collect();
        let c = candidate_halfspaces(&pts, 1, 0);
        assert_eq!(*halfspace_losses(&c, &data).iter().min().unwrap(), 0);
    }
}
