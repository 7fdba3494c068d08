//! Dense row-major kernels. Each output row depends only on its own input
//! row, which keeps node-wise maps exactly permutation equivariant.

/// y = x W + b for `rows` rows; `w` is `inp x out`. Returns multiply-adds.
pub fn linear(x: &[f64], rows: usize, inp: usize, w: &[f64], b: &[f64], y: &mut Vec<f64>) -> u64 {
    let out = b.len();
    debug_assert_eq!(x.len(), rows * inp);
    debug_assert_eq!(w.len(), inp * out);
    y.clear();
    y.reserve(rows * out);
    for r in 0..rows {
        y.extend_from_slice(b);
        let yr = &mut y[r * out..(r + 1) * out];
        for (k, &xv) in x[r * inp..(r + 1) * inp].iter().enumerate() {
            if xv == 0.0 {
                continue;
            }
            for (yo, wo) in yr.iter_mut().zip(&w[k * out..(k + 1) * out]) {
                *yo += xv * wo;
            }
        }
    }
    (rows * inp * out) as u64
}

/// Backward of [`linear`]: accumulates into `dw`, `db`, and writes `dx` if given.
pub fn linear_backward(
    x: &[f64],
    rows: usize,
    inp: usize,
    w: &[f64],
    dy: &[f64],
    dw: &mut [f64],
    db: &mut [f64],
    dx: Option<&mut Vec<f64>>,
) {
    let out = db.len();
    for r in 0..rows {
        let dyr = &dy[r * out..(r + 1) * out];
        for (d, g) in db.iter_mut().zip(dyr) {
            *d += g;
        }
        for (k, &xv) in x[r * inp..(r + 1) * inp].iter().enumerate() {
            if xv == 0.0 {
                continue;
            }
            for (d, g) in dw[k * out..(k + 1) * out].iter_mut().zip(dyr) {
                *d += xv * g;
            }
        }
    }
    if let Some(dx) = dx {
        dx.clear();
        dx.resize(rows * inp, 0.0);
        for r in 0..rows {
            let dyr = &dy[r * out..(r + 1) * out];
            for k in 0..inp {
                let mut s = 0.0;
                for (g, wv) in dyr.iter().zip(&w[k * out..(k + 1) * out]) {
                    s += g * wv;
                }
                dx[r * inp + k] = s;
            }
        }
    }
}

pub fn relu_in_place(v: &mut [f64]) {
    for x in v {
        if *x <= 0.0 {
            *x = 0.0;
        }
    }
}

/// Zeroes gradient entries whose forward activation was clipped.
pub fn relu_backward(post: &[f64], grad: &mut [f64]) {
    for (g, &p) in grad.iter_mut().zip(post) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

pub fn softmax_rows(logits: &[f64], cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks(cols) {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let start = out.len();
        let mut s = 0.0;
        for &z in row {
            let e = (z - m).exp();
            s += e;
            out.push(e);
        }
        for p in &mut out[start..] {
            *p /= s;
        }
    }
    out
}

/// Column sums of a `rows x cols` matrix that do not depend on row order:
/// each column is sorted, then reduced by adjacent pairs.
pub fn order_free_column_sum(x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut col = Vec::with_capacity(rows);
    (0..cols)
        .map(|c| {
            col.clear();
            col.extend((0..rows).map(|r| x[r * cols + c]));
            col.sort_by(f64::total_cmp);
            pairwise_sum(&mut col)
        })
        .collect()
}

fn pairwise_sum(v: &mut Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    while v.len() > 1 {
        let half = v.len() / 2;
        for k in 0..half {
            v[k] = v[2 * k] + v[2 * k + 1];
        }
        if v.len() % 2 == 1 {
            v[half] = v[v.len() - 1];
            v.truncate(half + 1);
        } else {
            v.truncate(half);
        }
    }
    v[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_small() {
        // [1 2] * [[1 0 1],[0 1 1]] + [0.5 0 0]
        let mut y = Vec::new();
        let macs = linear(
            &[1.0, 2.0],
            1,
            2,
            &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0],
            &[0.5, 0.0, 0.0],
            &mut y,
        );
        assert_eq!(y, vec![1.5, 2.0, 3.0]);
        assert_eq!(macs, 6);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let p = softmax_rows(&[0.0, 0.0, 0.0, 1000.0, -5.0, 3.0], 3);
        assert_eq!(&p[..3], &[1.0 / 3.0; 3]);
        assert!((p[3..].iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn column_sum_ignores_row_order_and_doubles_exactly() {
        let x = [0.1, 3.0, 0.7, 1e-9, 0.3, 2.5, 1.1, 0.0, 0.2, 7.0];
        let a = order_free_column_sum(&x, 5, 2);
        let shuffled = [1.1, 0.0, 0.3, 2.5, 0.1, 3.0, 0.2, 7.0, 0.7, 1e-9];
        assert_eq!(a, order_free_column_sum(&shuffled, 5, 2));
        let twice: Vec<f64> = x.iter().chain(&x).copied().collect();
        let b = order_free_column_sum(&twice, 10, 2);
        assert_eq!(b, vec![2.0 * a[0], 2.0 * a[1]]);
        assert_eq!(order_free_column_sum(&[], 0, 3), vec![0.0; 3]);
    }
}
