//! Histogram split search for shallow squared-error trees.
//!
//! When every feature takes few distinct values, each node's candidate splits
//! can be read off per-feature histograms instead of presorted row orders.
//! The candidate thresholds, tie rules and stopping rules are the same as in
//! [`grow`](super::builder::grow) with [`SquaredError`](super::builder::SquaredError),
//! so both produce the same tree up to floating-point summation order.

use ndarray::ArrayView2;

use super::builder::{Grown, Node, MIN_DECREASE, TIE_EPS};

/// Row-major bin codes plus each feature's sorted distinct values.
pub(crate) struct Binned {
    codes: Vec<u16>,
    values: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    d: usize,
}

impl Binned {
    /// `None` when some feature has more than `max_bins` distinct values.
    pub fn new(x: ArrayView2<'_, f64>, max_bins: usize) -> Option<Binned> {
        let (n, d) = x.dim();
        let max_bins = max_bins.min(usize::from(u16::MAX) + 1);
        let mut values = Vec::with_capacity(d);
        let mut codes = vec![0u16; n * d];
        for (f, col) in x.columns().into_iter().enumerate() {
            let mut distinct: Vec<f64> = col.to_vec();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if distinct.len() > max_bins {
                return None;
            }
            for (i, v) in col.iter().enumerate() {
                let b = distinct.partition_point(|u| u < v);
                codes[i * d + f] = b as u16;
            }
            values.push(distinct);
        }
        let mut offsets = Vec::with_capacity(d + 1);
        let mut acc = 0;
        for v in &values {
            offsets.push(acc);
            acc += v.len();
        }
        offsets.push(acc);
        Some(Binned {
            codes,
            values,
            offsets,
            d,
        })
    }
}

fn impurity(s: &[f64; 3]) -> f64 {
    if s[0] <= 0.0 {
        return 0.0;
    }
    let mean = s[1] / s[0];
    (s[2] / s[0] - mean * mean).max(0.0)
}

fn decrease(total: &[f64; 3], left: &[f64; 3], right: &[f64; 3]) -> f64 {
    let (w, wl, wr) = (total[0], left[0], right[0]);
    if wl <= 0.0 || wr <= 0.0 {
        return 0.0;
    }
    let diff = left[1] / wl - right[1] / wr;
    wl * wr / (w * w) * diff * diff
}

/// Grows a squared-error regression tree on the rows with positive weight.
pub(crate) fn grow_binned<F>(
    b: &Binned,
    weights: &[f64],
    targets: &[f64],
    max_depth: Option<usize>,
    min_samples_split: usize,
    mut leaf: F,
) -> Grown<f64>
where
    F: FnMut(&[u32]) -> f64,
{
    let d = b.d;
    let mut rows: Vec<u32> = (0..weights.len() as u32)
        .filter(|&i| weights[i as usize] > 0.0)
        .collect();
    let n = rows.len();
    let n_bins = b.offsets[d];
    let mut hist = vec![[0.0f64; 3]; n_bins];
    let mut counts = vec![0u32; n_bins];
    let mut scratch: Vec<u32> = Vec::with_capacity(n);
    let mut importance = vec![0.0; d];
    let mut nodes: Vec<Node<f64>> = vec![Node::Leaf(0.0)];
    let mut root_weight = 0.0;

    let mut stack = vec![(0usize, 0usize, n, 0usize)];
    while let Some((slot, start, end, depth)) = stack.pop() {
        let node_rows = &rows[start..end];
        let mut total = [0.0; 3];
        for &r in node_rows {
            let (w, y) = (weights[r as usize], targets[r as usize]);
            total[0] += w;
            total[1] += w * y;
            total[2] += w * y * y;
        }
        if slot == 0 {
            root_weight = total[0];
        }
        let can_split =
            end - start >= min_samples_split.max(2) && max_depth.is_none_or(|m| depth < m) && impurity(&total) > 0.0;

        // (feature, last left bin, threshold, decrease, rows left)
        let mut best: Option<(usize, usize, f64, f64, usize)> = None;
        if can_split {
            hist.iter_mut().for_each(|h| *h = [0.0; 3]);
            counts.iter_mut().for_each(|c| *c = 0);
            for &r in node_rows {
                let r = r as usize;
                let (w, y) = (weights[r], targets[r]);
                let (wy, wyy) = (w * y, w * y * y);
                let codes = &b.codes[r * d..(r + 1) * d];
                for (f, &c) in codes.iter().enumerate() {
                    let k = b.offsets[f] + usize::from(c);
                    let h = &mut hist[k];
                    h[0] += w;
                    h[1] += wy;
                    h[2] += wyy;
                    counts[k] += 1;
                }
            }
            for f in 0..d {
                let (lo, hi) = (b.offsets[f], b.offsets[f + 1]);
                let vals = &b.values[f];
                let mut left = [0.0; 3];
                let mut n_left = 0usize;
                let mut prev: Option<usize> = None;
                for k in lo..hi {
                    if counts[k] == 0 {
                        continue;
                    }
                    if let Some(p) = prev {
                        let right = [total[0] - left[0], total[1] - left[1], total[2] - left[2]];
                        let dec = decrease(&total, &left, &right);
                        if best.is_none_or(|(.., bd, _)| dec > bd + TIE_EPS) {
                            let (a, bv) = (vals[p - lo], vals[k - lo]);
                            let mut thr = 0.5 * (a + bv);
                            if thr >= bv {
                                thr = a;
                            }
                            best = Some((f, p - lo, thr, dec, n_left));
                        }
                    }
                    let h = &hist[k];
                    left[0] += h[0];
                    left[1] += h[1];
                    left[2] += h[2];
                    n_left += counts[k] as usize;
                    prev = Some(k);
                }
            }
        }

        match best {
            Some((feature, last_bin, threshold, dec, n_left)) if dec > MIN_DECREASE => {
                importance[feature] += total[0] * dec;
                scratch.clear();
                let seg = &mut rows[start..end];
                let mut write = 0;
                for k in 0..seg.len() {
                    let r = seg[k];
                    if usize::from(b.codes[r as usize * d + feature]) <= last_bin {
                        seg[write] = r;
                        write += 1;
                    } else {
                        scratch.push(r);
                    }
                }
                seg[write..].copy_from_slice(&scratch);
                debug_assert_eq!(write, n_left);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(Node::Leaf(0.0));
                nodes.push(Node::Leaf(0.0));
                nodes[slot] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                let mid = start + n_left;
                stack.push((right, mid, end, depth + 1));
                stack.push((left, start, mid, depth + 1));
            }
            _ => nodes[slot] = Node::Leaf(leaf(&rows[start..end])),
        }
    }

    Grown {
        nodes,
        impurity_decrease: importance,
        root_weight,
    }
}
