use std::collections::{HashMap, VecDeque};

/// `exp(-gamma * |a - b|^2)`.
pub fn gaussian_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let dist2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * dist2).exp()
}

/// Bounded LRU memo of kernel matrix rows.
///
/// Capacity is counted in matrix entries; at least two rows are always kept
/// so a working pair never evicts itself.
pub(crate) struct KernelCache<'a> {
    points: &'a [Vec<f64>],
    gamma: f64,
    max_rows: usize,
    rows: HashMap<usize, Vec<f64>>,
    order: VecDeque<usize>,
    diagonal: Vec<f64>,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(points: &'a [Vec<f64>], gamma: f64, capacity_entries: usize) -> Self {
        let n = points.len().max(1);
        let diagonal = points.iter().map(|p| gaussian_kernel(p, p, gamma)).collect();
        Self {
            points,
            gamma,
            max_rows: (capacity_entries / n).max(2),
            rows: HashMap::new(),
            order: VecDeque::new(),
            diagonal,
        }
    }

    pub(crate) fn diag(&self, i: usize) -> f64 {
        self.diagonal[i]
    }

    pub(crate) fn row(&mut self, i: usize) -> &[f64] {
        if self.rows.contains_key(&i) {
            if let Some(pos) = self.order.iter().position(|&r| r == i) {
                self.order.remove(pos);
            }
        } else {
            if self.rows.len() >= self.max_rows {
                if let Some(old) = self.order.pop_front() {
                    self.rows.remove(&old);
                }
            }
            let p = &self.points[i];
            let row = self
                .points
                .iter()
                .map(|q| gaussian_kernel(p, q, self.gamma))
                .collect();
            self.rows.insert(i, row);
        }
        self.order.push_back(i);
        &self.rows[&i]
    }
}
