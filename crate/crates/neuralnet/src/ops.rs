//! Layer primitives and the blocked matrix kernels behind them.
//!
//! Convolutions are stride-1, same-padded cross-correlations realized as
//! im2col plus matmul. The matmul kernels block the contraction axis so
//! the large dense layers stay compute-bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::Tensor;
use crate::NnError;

/// Forward/inference switch for dropout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

const KBLOCK: usize = 64;

/// `c[m x n] += a[m x k] * b[k x n]`.
pub(crate) fn mm_ab_acc(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    let mut kb = 0;
    while kb < k {
        let kend = (kb + KBLOCK).min(k);
        for i in 0..m {
            let arow = &a[i * k..(i + 1) * k];
            let crow = &mut c[i * n..(i + 1) * n];
            for kk in kb..kend {
                let av = arow[kk];
                if av == 0.0 {
                    continue;
                }
                let brow = &b[kk * n..kk * n + n];
                for (cv, bv) in crow.iter_mut().zip(brow) {
                    *cv += av * bv;
                }
            }
        }
        kb = kend;
    }
}

/// `c[k x n] += a^T * b` with `a[m x k]`, `b[m x n]`.
pub(crate) fn mm_at_b_acc(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), m * n);
    debug_assert_eq!(c.len(), k * n);
    let mut kb = 0;
    while kb < k {
        let kend = (kb + KBLOCK).min(k);
        for i in 0..m {
            let arow = &a[i * k..(i + 1) * k];
            let brow = &b[i * n..(i + 1) * n];
            for kk in kb..kend {
                let av = arow[kk];
                if av == 0.0 {
                    continue;
                }
                let crow = &mut c[kk * n..kk * n + n];
                for (cv, bv) in crow.iter_mut().zip(brow) {
                    *cv += av * bv;
                }
            }
        }
        kb = kend;
    }
}

/// `c[m x n] = a * b^T` with `a[m x k]`, `b[n x k]`.
pub(crate) fn mm_a_bt(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(c.len(), m * n);
    for j in 0..n {
        let brow = &b[j * k..(j + 1) * k];
        for i in 0..m {
            let arow = &a[i * k..(i + 1) * k];
            c[i * n + j] = dot(arow, brow);
        }
    }
}

/// Four-lane dot product; the fixed accumulator split keeps results
/// deterministic while letting the loop vectorize.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let chunks = n / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..chunks {
        let j = i * 4;
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in chunks * 4..n {
        tail += a[j] * b[j];
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// Lay out k x k same-padded patches of `input[h x w x c]` as rows of
/// `cols[(h*w) x (k*k*c)]`, patch entries ordered (ky, kx, c).
pub(crate) fn im2col(input: &[f64], h: usize, w: usize, c: usize, k: usize, cols: &mut Vec<f64>) {
    let pad = (k / 2) as isize;
    let row_len = k * k * c;
    cols.clear();
    cols.resize(h * w * row_len, 0.0);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let row_base = (y as usize * w + x as usize) * row_len;
            for ky in 0..k as isize {
                let sy = y + ky - pad;
                if sy < 0 || sy >= h as isize {
                    continue;
                }
                for kx in 0..k as isize {
                    let sx = x + kx - pad;
                    if sx < 0 || sx >= w as isize {
                        continue;
                    }
                    let src = ((sy as usize) * w + sx as usize) * c;
                    let dst = row_base + ((ky as usize * k) + kx as usize) * c;
                    cols[dst..dst + c].copy_from_slice(&input[src..src + c]);
                }
            }
        }
    }
}

/// Scatter-add the im2col layout back onto the input grid.
pub(crate) fn col2im_acc(
    cols: &[f64],
    h: usize,
    w: usize,
    c: usize,
    k: usize,
    input_grad: &mut [f64],
) {
    let pad = (k / 2) as isize;
    let row_len = k * k * c;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let row_base = (y as usize * w + x as usize) * row_len;
            for ky in 0..k as isize {
                let sy = y + ky - pad;
                if sy < 0 || sy >= h as isize {
                    continue;
                }
                for kx in 0..k as isize {
                    let sx = x + kx - pad;
                    if sx < 0 || sx >= w as isize {
                        continue;
                    }
                    let dst = ((sy as usize) * w + sx as usize) * c;
                    let src = row_base + ((ky as usize * k) + kx as usize) * c;
                    for i in 0..c {
                        input_grad[dst + i] += cols[src + i];
                    }
                }
            }
        }
    }
}

fn conv_shapes(input: &Tensor, kernels: &Tensor, bias: &Tensor) -> Result<(usize, usize, usize, usize, usize), NnError> {
    let (h, w, c) = match *input.dims() {
        [h, w, c] => (h, w, c),
        _ => return Err(NnError::Shape(format!("conv input must be HxWxC, got {:?}", input.dims()))),
    };
    let (k, c_in, d) = match *kernels.dims() {
        [k0, k1, ci, d] if k0 == k1 => (k0, ci, d),
        _ => {
            return Err(NnError::Shape(format!(
                "kernels must be k x k x C x D, got {:?}",
                kernels.dims()
            )))
        }
    };
    if k % 2 == 0 {
        return Err(NnError::Shape(format!("kernel side {k} must be odd")));
    }
    if c_in != c {
        return Err(NnError::Shape(format!(
            "kernel expects {c_in} input channels, image has {c}"
        )));
    }
    if bias.dims() != [d] {
        return Err(NnError::Shape(format!(
            "bias dims {:?} do not match depth {d}",
            bias.dims()
        )));
    }
    Ok((h, w, c, k, d))
}

/// Same-padded stride-1 cross-correlation plus bias: `[h x w x c]` with
/// `[k x k x c x d]` kernels yields `[h x w x d]`.
pub fn conv2d_forward(input: &Tensor, kernels: &Tensor, bias: &Tensor) -> Result<Tensor, NnError> {
    let (h, w, c, k, d) = conv_shapes(input, kernels, bias)?;
    let mut cols = Vec::new();
    im2col(input.data(), h, w, c, k, &mut cols);
    let mut out = Tensor::zeros(&[h, w, d]);
    mm_ab_acc(out.data_mut(), &cols, kernels.data(), h * w, k * k * c, d);
    for px in out.data_mut().chunks_exact_mut(d) {
        for (o, b) in px.iter_mut().zip(bias.data()) {
            *o += b;
        }
    }
    Ok(out)
}

/// Gradients of [`conv2d_forward`] given the upstream gradient `dout`.
///
/// Returns `(d_input, d_kernels, d_bias)`.
pub(crate) fn conv2d_backward(
    input: &Tensor,
    kernels: &Tensor,
    dout: &Tensor,
) -> Result<(Tensor, Tensor, Tensor), NnError> {
    let (h, w, c, k, d) = {
        let bias = Tensor::zeros(&[kernels.dims()[3]]);
        conv_shapes(input, kernels, &bias)?
    };
    if dout.dims() != [h, w, d] {
        return Err(NnError::Shape(format!(
            "dout dims {:?} do not match {h}x{w}x{d}",
            dout.dims()
        )));
    }
    let mut cols = Vec::new();
    im2col(input.data(), h, w, c, k, &mut cols);

    let mut d_kernels = kernels.zeros_like();
    mm_at_b_acc(d_kernels.data_mut(), &cols, dout.data(), h * w, k * k * c, d);

    let mut d_bias = Tensor::zeros(&[d]);
    for px in dout.data().chunks_exact(d) {
        for (g, v) in d_bias.data_mut().iter_mut().zip(px) {
            *g += v;
        }
    }

    let mut d_cols = vec![0.0; h * w * k * k * c];
    mm_a_bt(&mut d_cols, dout.data(), kernels.data(), h * w, d, k * k * c);
    let mut d_input = input.zeros_like();
    col2im_acc(&d_cols, h, w, c, k, d_input.data_mut());
    Ok((d_input, d_kernels, d_bias))
}

/// Elementwise `max(0, x)`.
pub fn relu(t: &Tensor) -> Tensor {
    let mut out = t.clone();
    for v in out.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    out
}

/// Inverted dropout. In train mode each element survives with probability
/// `1 - rate` and is scaled by `1/(1 - rate)`; inference is the identity.
pub fn dropout(t: &Tensor, rate: f64, mode: Mode, seed: u64) -> Result<Tensor, NnError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(NnError::Config("dropout rate must lie in [0, 1)"));
    }
    if mode == Mode::Infer || rate == 0.0 {
        return Ok(t.clone());
    }
    let mask = dropout_mask(t.len(), rate, seed);
    let mut out = t.clone();
    apply_dropout(out.data_mut(), &mask, rate);
    Ok(out)
}

pub(crate) fn dropout_mask(len: usize, rate: f64, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| u8::from(rng.random::<f64>() >= rate))
        .collect()
}

pub(crate) fn apply_dropout(data: &mut [f64], mask: &[u8], rate: f64) {
    let scale = 1.0 / (1.0 - rate);
    for (v, &m) in data.iter_mut().zip(mask) {
        *v = if m == 1 { *v * scale } else { 0.0 };
    }
}

/// Affine map `x * W + b` for a single vector `x[in]`, `W[in x out]`.
pub fn dense_forward(x: &[f64], weight: &Tensor, bias: &Tensor) -> Result<Vec<f64>, NnError> {
    let (n_in, n_out) = match *weight.dims() {
        [i, o] => (i, o),
        _ => return Err(NnError::Shape(format!("weight must be 2-d, got {:?}", weight.dims()))),
    };
    if x.len() != n_in || bias.dims() != [n_out] {
        return Err(NnError::Shape(format!(
            "dense shapes: x[{}] W[{n_in}x{n_out}] b{:?}",
            x.len(),
            bias.dims()
        )));
    }
    let mut out = bias.data().to_vec();
    mm_ab_acc(&mut out, x, weight.data(), 1, n_in, n_out);
    Ok(out)
}

/// Row-major flatten.
pub fn flatten(t: &Tensor) -> Vec<f64> {
    t.data().to_vec()
}

/// Concatenate two `h x w x d` tensors along depth.
pub fn concat_depth(a: &Tensor, b: &Tensor) -> Result<Tensor, NnError> {
    let ([h1, w1, d1], [h2, w2, d2]) = match (a.dims(), b.dims()) {
        ([h1, w1, d1], [h2, w2, d2]) => ([*h1, *w1, *d1], [*h2, *w2, *d2]),
        _ => return Err(NnError::Shape("concat_depth expects two HxWxD tensors".into())),
    };
    if (h1, w1) != (h2, w2) {
        return Err(NnError::Shape(format!(
            "spatial dims differ: {h1}x{w1} vs {h2}x{w2}"
        )));
    }
    let mut out = Tensor::zeros(&[h1, w1, d1 + d2]);
    {
        let dst = out.data_mut();
        for p in 0..h1 * w1 {
            dst[p * (d1 + d2)..p * (d1 + d2) + d1]
                .copy_from_slice(&a.data()[p * d1..(p + 1) * d1]);
            dst[p * (d1 + d2) + d1..(p + 1) * (d1 + d2)]
                .copy_from_slice(&b.data()[p * d2..(p + 1) * d2]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for kk in 0..k {
                    s += a[i * k + kk] * b[kk * n + j];
                }
                c[i * n + j] = s;
            }
        }
        c
    }

    #[test]
    fn blocked_matmuls_match_naive() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m, k, n) = (7, 130, 9);
        let a: Vec<f64> = (0..m * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..k * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let want = naive_matmul(&a, &b, m, k, n);

        let mut c = vec![0.0; m * n];
        mm_ab_acc(&mut c, &a, &b, m, k, n);
        for (x, y) in c.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }

        // a^T * b: treat `a` as [k x m] by transposing the reference.
        let mut at = vec![0.0; k * m];
        for i in 0..m {
            for kk in 0..k {
                at[kk * m + i] = a[i * k + kk];
            }
        }
        let want_t = naive_matmul(&at, &b, k, m, n);
        let mut c2 = vec![0.0; k * n];
        // here m plays the contraction role: c2[k x n] += a^T[k x m] b[m x n]
        let bm: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let want2 = naive_matmul(&at, &bm, k, m, n);
        mm_at_b_acc(&mut c2, &a, &bm, m, k, n);
        for (x, y) in c2.iter().zip(&want2) {
            assert!((x - y).abs() < 1e-12);
        }
        let _ = want_t;

        // a * b^T with b stored [n x k].
        let bt: Vec<f64> = (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut btt = vec![0.0; k * n];
        for j in 0..n {
            for kk in 0..k {
                btt[kk * n + j] = bt[j * k + kk];
            }
        }
        let want3 = naive_matmul(&a, &btt, m, k, n);
        let mut c3 = vec![0.0; m * n];
        mm_a_bt(&mut c3, &a, &bt, m, k, n);
        for (x, y) in c3.iter().zip(&want3) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_kernel_passes_input_through() {
        let h = 5;
        let c = 3;
        let input = Tensor::from_vec(
            &[h, h, c],
            (0..h * h * c).map(|i| i as f64 * 0.1 - 2.0).collect(),
        )
        .unwrap();
        // Centre tap 1 on the matching channel, zero elsewhere.
        let mut kernels = Tensor::zeros(&[3, 3, c, c]);
        for ch in 0..c {
            let idx = ((1 * 3 + 1) * c + ch) * c + ch;
            kernels.data_mut()[idx] = 1.0;
        }
        let bias = Tensor::zeros(&[c]);
        let out = conv2d_forward(&input, &kernels, &bias).unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn ones_kernel_counts_padded_neighbourhood() {
        let h = 4;
        let input = Tensor::from_vec(&[h, h, 1], vec![1.0; h * h]).unwrap();
        let kernels = Tensor::from_vec(&[3, 3, 1, 1], vec![1.0; 9]).unwrap();
        let bias = Tensor::zeros(&[1]);
        let out = conv2d_forward(&input, &kernels, &bias).unwrap();
        // Interior cells see all 9 taps, corners 4, edges 6.
        assert_eq!(out.data()[(1 * h + 1) * 1], 9.0);
        assert_eq!(out.data()[0], 4.0);
        assert_eq!(out.data()[1], 6.0);
    }

    #[test]
    fn zero_kernel_with_bias_is_constant() {
        let input = Tensor::from_vec(&[3, 3, 2], (0..18).map(|i| i as f64).collect()).unwrap();
        let kernels = Tensor::zeros(&[3, 3, 2, 4]);
        let bias = Tensor::from_vec(&[4], vec![0.5, -1.0, 2.0, 0.0]).unwrap();
        let out = conv2d_forward(&input, &kernels, &bias).unwrap();
        for px in out.data().chunks_exact(4) {
            assert_eq!(px, &[0.5, -1.0, 2.0, 0.0]);
        }
    }

    #[test]
    fn conv_shape_mismatches_are_errors() {
        let input = Tensor::zeros(&[4, 4, 3]);
        let bias = Tensor::zeros(&[2]);
        assert!(conv2d_forward(&input, &Tensor::zeros(&[3, 3, 4, 2]), &bias).is_err());
        assert!(conv2d_forward(&input, &Tensor::zeros(&[2, 2, 3, 2]), &bias).is_err());
        assert!(conv2d_forward(&input, &Tensor::zeros(&[3, 3, 3, 5]), &bias).is_err());
    }

    #[test]
    fn relu_reference() {
        let t = Tensor::from_vec(&[3], vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&t).data(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn dropout_contracts() {
        let t = Tensor::from_vec(&[100], (0..100).map(|i| i as f64 + 1.0).collect()).unwrap();
        // Rate zero: identity in both modes.
        assert_eq!(dropout(&t, 0.0, Mode::Train, 1).unwrap(), t);
        assert_eq!(dropout(&t, 0.0, Mode::Infer, 1).unwrap(), t);
        // Inference: identity regardless of rate.
        assert_eq!(dropout(&t, 0.7, Mode::Infer, 1).unwrap(), t);
        // Train mode: surviving entries are scaled, dropped ones are zero.
        let d = dropout(&t, 0.5, Mode::Train, 7).unwrap();
        let mut survivors = 0;
        for (orig, got) in t.data().iter().zip(d.data()) {
            if *got != 0.0 {
                assert!((got - orig * 2.0).abs() < 1e-12);
                survivors += 1;
            }
        }
        assert!(survivors > 20 && survivors < 80);
        // Deterministic per seed.
        assert_eq!(d, dropout(&t, 0.5, Mode::Train, 7).unwrap());
        assert!(dropout(&t, 1.0, Mode::Train, 7).is_err());
    }

    #[test]
    fn concat_and_flatten_layout() {
        let a = Tensor::from_vec(&[1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Tensor::from_vec(&[1, 2, 1], vec![9.0, 8.0]).unwrap();
        let c = concat_depth(&a, &b).unwrap();
        assert_eq!(c.dims(), &[1, 2, 3]);
        assert_eq!(flatten(&c), vec![1.0, 2.0, 9.0, 3.0, 4.0, 8.0]);
        assert!(concat_depth(&a, &Tensor::zeros(&[2, 2, 1])).is_err());
    }

    #[test]
    fn dense_forward_reference() {
        let w = Tensor::from_vec(&[2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Tensor::from_vec(&[3], vec![0.5, 0.0, -0.5]).unwrap();
        let y = dense_forward(&[1.0, -1.0], &w, &b).unwrap();
        assert_eq!(y, vec![1.0 - 4.0 + 0.5, 2.0 - 5.0, 3.0 - 6.0 - 0.5]);
        assert!(dense_forward(&[1.0], &w, &b).is_err());
    }

    #[test]
    fn conv_backward_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h, w, c, k, d) = (3, 3, 2, 3, 2);
        let input = Tensor::from_vec(
            &[h, w, c],
            (0..h * w * c).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let kernels = Tensor::from_vec(
            &[k, k, c, d],
            (0..k * k * c * d).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let bias = Tensor::from_vec(&[d], vec![0.1, -0.2]).unwrap();

        // Scalar objective: sum of outputs.
        let objective = |inp: &Tensor, ker: &Tensor, b: &Tensor| -> f64 {
            conv2d_forward(inp, ker, b).unwrap().data().iter().sum()
        };
        let dout = Tensor::from_vec(&[h, w, d], vec![1.0; h * w * d]).unwrap();
        let (di, dk, db) = conv2d_backward(&input, &kernels, &dout).unwrap();

        let eps = 1e-6;
        for idx in 0..kernels.len() {
            let mut kp = kernels.clone();
            kp.data_mut()[idx] += eps;
            let mut km = kernels.clone();
            km.data_mut()[idx] -= eps;
            let fd = (objective(&input, &kp, &bias) - objective(&input, &km, &bias)) / (2.0 * eps);
            assert!((fd - dk.data()[idx]).abs() < 1e-6, "kernel grad {idx}");
        }
        for idx in 0..input.len() {
            let mut ip = input.clone();
            ip.data_mut()[idx] += eps;
            let mut im = input.clone();
            im.data_mut()[idx] -= eps;
            let fd = (objective(&ip, &kernels, &bias) - objective(&im, &kernels, &bias)) / (2.0 * eps);
            assert!((fd - di.data()[idx]).abs() < 1e-6, "input grad {idx}");
        }
        for idx in 0..bias.len() {
            let mut bp = bias.clone();
            bp.data_mut()[idx] += eps;
            let mut bm = bias.clone();
            bm.data_mut()[idx] -= eps;
            let fd = (objective(&input, &kernels, &bp) - objective(&input, &kernels, &bm)) / (2.0 * eps);
            assert!((fd - db.data()[idx]).abs() < 1e-6, "bias grad {idx}");
        }
    }
}
