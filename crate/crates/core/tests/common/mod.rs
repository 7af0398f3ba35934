//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the curve code under test.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

/// `(threshold, v, s)` for every distinct score plus the +inf sentinel,
/// ascending by threshold, counted by brute force.
pub fn brute_points(scores: &[f64], labels: &[u8]) -> Vec<(f64, f64, f64)> {
    let mut ts: Vec<f64> = scores.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.push(f64::INFINITY);
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    ts.into_iter()
        .map(|t| {
            let (mut tn, mut fn_) = (0usize, 0usize);
            for (&x, &y) in scores.iter().zip(labels) {
                if x < t {
                    if y == 0 {
                        tn += 1;
                    } else {
                        fn_ += 1;
                    }
                }
            }
            (t, tn as f64 / neg as f64, fn_ as f64 / pos as f64)
        })
        .collect()
}

/// Largest `recall_0 + recall_1 - 1`; the first (smallest) threshold wins ties.
pub fn brute_youden(scores: &[f64], labels: &[u8]) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for (t, v, s) in brute_points(scores, labels) {
        let j = v + (1.0 - s) - 1.0;
        if j > best.0 {
            best = (j, t);
        }
    }
    best
}

/// Largest `v` with `s <= s_target`, ties to lower slip then lower
/// threshold. No threshold when the best `v` is 0.
pub fn brute_v_at_s(scores: &[f64], labels: &[u8], s_target: f64) -> (f64, Option<f64>) {
    let mut best: Option<(f64, f64, f64)> = None;
    for (t, v, s) in brute_points(scores, labels) {
        if s > s_target {
            continue;
        }
        if best.is_none_or(|(bv, bs, _)| v > bv || (v == bv && s < bs)) {
            best = Some((v, s, t));
        }
    }
    match best {
        Some((v, _, t)) if v > 0.0 => (v, Some(t)),
        _ => (0.0, None),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Smallest multiple of `base` that is at least `min`.
fn aligned(base: usize, min: usize) -> usize {
    base * min.div_ceil(base)
}

/// Number of row midpoints `(r + 0.5) / rows` in `[lo, hi)`.
fn rows_between(lo: f64, hi: f64, rows: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    let r = rows as f64;
    let first = (lo * r - 0.5).ceil().max(0.0) as usize;
    let end = ((hi * r - 0.5).ceil().max(0.0) as usize).min(rows);
    end.saturating_sub(first)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridCase {
    Reached,
    Intersects,
    Gap,
}

/// Constrained area under the slip / volume-reduction staircase by cell
/// counting on a grid of at least `min_cells` columns and rows.
///
/// The staircase at `v` is the best `1 - s` among points with volume
/// reduction at least `v`. Grid lines are placed on multiples of
/// `1 / n_neg` and `1 / n_pos` as well as the target edges (the default
/// targets 0.4 and 0.01), so every cell lies wholly inside or outside each
/// region and midpoint counting is exact.
pub fn grid_cauc(scores: &[f64], labels: &[u8], min_cells: usize) -> (f64, GridCase, usize) {
    let (s_target, v_target) = (0.01, 0.4);
    let floor = 1.0 - s_target;
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    let cols = aligned(lcm(neg, 5), min_cells);
    let rows = aligned(lcm(pos, 100), min_cells);
    let pts = brute_points(scores, labels);
    let height = |v: f64| {
        pts.iter()
            .filter(|p| p.1 >= v)
            .map(|p| 1.0 - p.2)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let reached = pts.iter().any(|&(_, v, s)| s <= s_target && v >= v_target);
    let (mut zone_cells, mut under_in_zone) = (0usize, 0usize);
    let (mut left_cells, mut under_left) = (0usize, 0usize);
    for c in 0..cols {
        let vm = (c as f64 + 0.5) / cols as f64;
        let h = height(vm);
        if vm >= v_target {
            zone_cells += rows_between(floor, 1.0, rows);
            under_in_zone += rows_between(floor, h.min(1.0), rows);
        } else {
            left_cells += rows_between(0.0, floor, rows);
            under_left += rows_between(0.0, h.min(floor), rows);
        }
    }
    let cells = cols * rows;
    if reached {
        (under_in_zone as f64 / zone_cells as f64, GridCase::Reached, cells)
    } else if under_in_zone > 0 {
        (0.0, GridCase::Intersects, cells)
    } else {
        (
            (under_left as f64 - left_cells as f64) / left_cells as f64,
            GridCase::Gap,
            cells,
        )
    }
}

/// Random scored set with exactly `max(1, round(n * prevalence))`
/// defects. A random shift lifts defect scores by a varying amount, and
/// about a third of the sets are quantized to force ties.
pub fn random_set(rng: &mut impl Rng, n: usize, prevalence: f64) -> (Vec<f64>, Vec<u8>) {
    let pos = ((n as f64 * prevalence).round() as usize).clamp(1, n - 1);
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < pos)).collect();
    labels.shuffle(rng);
    let quality: f64 = rng.random_range(0.0..1.5);
    let levels: Option<f64> = rng.random_bool(0.3).then(|| rng.random_range(5..40) as f64);
    let scores = labels
        .iter()
        .map(|&y| {
            let base: f64 = rng.random_range(0.0..1.0);
            let x = if y == 1 {
                (base + quality).min(1.0) * 0.9 + 0.1 * base
            } else {
                base * 0.9
            };
            match levels {
                Some(l) => (x * l).round() / l,
                None => x,
            }
        })
        .collect();
    (scores, labels)
}
