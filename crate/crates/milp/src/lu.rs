//! Sparse LU factorization of simplex bases with product-form updates.
//!
//! Columns are eliminated left-looking in order of increasing nonzero count.
//! Each column is reduced against the already-built `L` factor (pivot steps
//! are replayed in ascending order through a min-heap, which is a valid
//! topological order), then a pivot row is picked by threshold partial
//! pivoting with a row-count tie break.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const NONE: usize = usize::MAX;
const DROP_TOL: f64 = 1e-14;
const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

/// Basis positions whose columns could not be pivoted, with the rows left uncovered.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct LuFactor {
    m: usize,
    step_row: Vec<usize>,
    step_pos: Vec<usize>,
    l_start: Vec<usize>,
    l_row: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_step: Vec<usize>,
    u_val: Vec<f64>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
}

impl LuFactor {
    /// Factorizes the `m x m` matrix whose column at basis position `p` is `cols[p]`
    /// (a list of `(row, value)` pairs).
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].len(), p));

        let mut row_count = vec![0usize; m];
        for col in cols {
            for &(i, _) in col {
                row_count[i] += 1;
            }
        }

        let mut f = LuFactor {
            m,
            step_row: Vec::with_capacity(m),
            step_pos: Vec::with_capacity(m),
            l_start: vec![0],
            l_row: Vec::new(),
            l_val: Vec::new(),
            u_start: vec![0],
            u_step: Vec::new(),
            u_val: Vec::new(),
            u_diag: Vec::with_capacity(m),
            etas: Vec::new(),
        };

        let mut row_step = vec![NONE; m];
        let mut w = vec![0.0; m];
        let mut in_nz = vec![false; m];
        let mut nz: Vec<usize> = Vec::new();
        let mut queued = vec![false; m];
        let mut queued_list: Vec<usize> = Vec::new();
        let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
        let mut singular_positions = Vec::new();

        for &pos in &order {
            let mut col_max = 0.0f64;
            for &(i, v) in &cols[pos] {
                w[i] += v;
                col_max = col_max.max(v.abs());
                if !in_nz[i] {
                    in_nz[i] = true;
                    nz.push(i);
                }
            }
            for &i in &nz {
                let s = row_step[i];
                if s != NONE && !queued[s] {
                    queued[s] = true;
                    queued_list.push(s);
                    heap.push(Reverse(s));
                }
            }
            while let Some(Reverse(t)) = heap.pop() {
                let v = w[f.step_row[t]];
                if v == 0.0 {
                    continue;
                }
                for e in f.l_start[t]..f.l_start[t + 1] {
                    let i = f.l_row[e];
                    if !in_nz[i] {
                        in_nz[i] = true;
                        nz.push(i);
                        let s = row_step[i];
                        if s != NONE && !queued[s] {
                            queued[s] = true;
                            queued_list.push(s);
                            heap.push(Reverse(s));
                        }
                    }
                    w[i] -= f.l_val[e] * v;
                }
            }

            let mut amax = 0.0f64;
            for &i in &nz {
                if row_step[i] == NONE {
                    amax = amax.max(w[i].abs());
                }
            }
            if amax <= SINGULAR_TOL * col_max.max(1.0) {
                singular_positions.push(pos);
            } else {
                let mut pivot_row = NONE;
                for &i in &nz {
                    if row_step[i] != NONE || w[i].abs() < PIVOT_THRESHOLD * amax {
                        continue;
                    }
                    if pivot_row == NONE {
                        pivot_row = i;
                        continue;
                    }
                    let better = (row_count[i], Reverse(ordered(w[i].abs())), i)
                        < (row_count[pivot_row], Reverse(ordered(w[pivot_row].abs())), pivot_row);
                    if better {
                        pivot_row = i;
                    }
                }
                let piv = w[pivot_row];
                let k = f.step_row.len();
                for &i in &nz {
                    let v = w[i];
                    if v.abs() <= DROP_TOL || i == pivot_row {
                        continue;
                    }
                    if row_step[i] != NONE {
                        f.u_step.push(row_step[i]);
                        f.u_val.push(v);
                    } else {
                        f.l_row.push(i);
                        f.l_val.push(v / piv);
                    }
                }
                f.u_start.push(f.u_step.len());
                f.l_start.push(f.l_row.len());
                f.u_diag.push(piv);
                f.step_row.push(pivot_row);
                f.step_pos.push(pos);
                row_step[pivot_row] = k;
            }

            for &(i, _) in &cols[pos] {
                row_count[i] -= 1;
            }
            for &i in &nz {
                w[i] = 0.0;
                in_nz[i] = false;
            }
            nz.clear();
            for &s in &queued_list {
                queued[s] = false;
            }
            queued_list.clear();
        }

        if singular_positions.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&i| row_step[i] == NONE).collect();
            Err(Singular { positions: singular_positions, rows })
        }
    }

    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Records the replacement of the column at `pos` by a column whose
    /// transformed representation (`B^-1 a`) is `alpha`.
    pub fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &v) in alpha.iter().enumerate() {
            if i != pos && v.abs() > DROP_TOL {
                idx.push(i);
                val.push(v);
            }
        }
        self.etas.push(Eta { pos, pivot: alpha[pos], idx, val });
    }

    /// Solves `B z = b`. `rhs` is indexed by row and is overwritten; the result is indexed by basis position.
    pub fn ftran(&self, rhs: &mut [f64]) -> Vec<f64> {
        let m = self.m;
        for k in 0..m {
            let v = rhs[self.step_row[k]];
            if v == 0.0 {
                continue;
            }
            for e in self.l_start[k]..self.l_start[k + 1] {
                rhs[self.l_row[e]] -= self.l_val[e] * v;
            }
        }
        let mut ys: Vec<f64> = self.step_row.iter().map(|&r| rhs[r]).collect();
        for k in (0..m).rev() {
            let z = ys[k] / self.u_diag[k];
            ys[k] = z;
            if z == 0.0 {
                continue;
            }
            for e in self.u_start[k]..self.u_start[k + 1] {
                ys[self.u_step[e]] -= self.u_val[e] * z;
            }
        }
        let mut out = vec![0.0; m];
        for k in 0..m {
            out[self.step_pos[k]] = ys[k];
        }
        for eta in &self.etas {
            let zr = out[eta.pos] / eta.pivot;
            out[eta.pos] = zr;
            if zr == 0.0 {
                continue;
            }
            for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                out[i] -= v * zr;
            }
        }
        out
    }

    /// Solves `B^T y = c`. `c` is indexed by basis position and is overwritten; the result is indexed by row.
    pub fn btran(&self, c: &mut [f64]) -> Vec<f64> {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut s = c[eta.pos];
            for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                s -= v * c[i];
            }
            c[eta.pos] = s / eta.pivot;
        }
        let mut ys = vec![0.0; m];
        for k in 0..m {
            let mut s = c[self.step_pos[k]];
            for e in self.u_start[k]..self.u_start[k + 1] {
                s -= self.u_val[e] * ys[self.u_step[e]];
            }
            ys[k] = s / self.u_diag[k];
        }
        let mut y = vec![0.0; m];
        for k in 0..m {
            y[self.step_row[k]] = ys[k];
        }
        for k in (0..m).rev() {
            let mut s = 0.0;
            for e in self.l_start[k]..self.l_start[k + 1] {
                s += self.l_val[e] * y[self.l_row[e]];
            }
            if s != 0.0 {
                y[self.step_row[k]] -= s;
            }
        }
        y
    }
}

fn ordered(v: f64) -> u64 {
    // nonnegative finite floats order like their bit patterns
    v.to_bits()
}
