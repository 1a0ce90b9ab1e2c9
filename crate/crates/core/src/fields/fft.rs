//! Multi-dimensional FFT on flat buffers, plus embedding between the
//! truncated coefficient box and the full grid spectrum.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

thread_local! {
    static PLAN_CACHE: RefCell<HashMap<(usize, usize), Rc<GridFft>>> = RefCell::new(HashMap::new());
}

/// Cached transform object for the given grid.
pub fn grid_fft(n_side: usize, axes: usize) -> Rc<GridFft> {
    PLAN_CACHE.with(|c| {
        c.borrow_mut()
            .entry((n_side, axes))
            .or_insert_with(|| Rc::new(GridFft::new(n_side, axes)))
            .clone()
    })
}

/// Forward/backward transforms for a hypercubic grid of side `n_side` in
/// `axes` dimensions. Normalisation: `forward` divides by the grid size so
/// coefficients are true Fourier coefficients of `e^{2*pi*i k.x}`.
pub struct GridFft {
    n_side: usize,
    axes: usize,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    bwd: Arc<dyn rustfft::Fft<f64>>,
}

impl GridFft {
    pub fn new(n_side: usize, axes: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n_side);
        let bwd = planner.plan_fft_inverse(n_side);
        Self { n_side, axes, fwd, bwd }
    }

    fn len(&self) -> usize {
        self.n_side.pow(self.axes as u32)
    }

    fn transform_axes(&self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.len());
        let n = self.n_side;
        let mut lane = vec![Complex64::default(); n];
        for axis in 0..self.axes {
            // stride between consecutive entries along `axis`
            let stride = n.pow((self.axes - 1 - axis) as u32);
            let block = stride * n;
            for base in 0..self.len() / block {
                for inner in 0..stride {
                    let start = base * block + inner;
                    for j in 0..n {
                        lane[j] = data[start + j * stride];
                    }
                    if forward {
                        self.fwd.process(&mut lane);
                    } else {
                        self.bwd.process(&mut lane);
                    }
                    for j in 0..n {
                        data[start + j * stride] = lane[j];
                    }
                }
            }
        }
    }

    /// Grid samples -> Fourier coefficients (with `rustfft` sign convention,
    /// forward kernel `e^{-2*pi*i k.x}`, normalised by `1/len`).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform_axes(data, true);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// Fourier coefficients -> grid samples.
    pub fn backward(&self, data: &mut [Complex64]) {
        self.transform_axes(data, false);
    }
}

/// Scatter the truncated box (side `2K+1`, centered) into a full-grid
/// spectrum laid out in standard FFT order (frequency `k mod n_side`).
pub fn box_to_grid_spectrum(
    boxed: &[Complex64],
    out: &mut [Complex64],
    n_side: usize,
    trunc: usize,
    axes: usize,
) {
    out.fill(Complex64::default());
    let side = 2 * trunc + 1;
    for (i, v) in boxed.iter().enumerate() {
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let mut rem = i;
        let mut off = 0usize;
        for d in (0..axes).rev() {
            let kd = (rem % side) as i64 - trunc as i64;
            rem /= side;
            let wrapped = kd.rem_euclid(n_side as i64) as usize;
            off += wrapped * n_side.pow((axes - 1 - d) as u32);
        }
        out[off] = *v;
    }
}

/// Gather the full-grid spectrum back into the truncated box, discarding
/// frequencies outside it.
pub fn grid_spectrum_to_box(
    spec: &[Complex64],
    boxed: &mut [Complex64],
    n_side: usize,
    trunc: usize,
    axes: usize,
) {
    let side = 2 * trunc + 1;
    for (i, slot) in boxed.iter_mut().enumerate() {
        let mut rem = i;
        let mut off = 0usize;
        for d in (0..axes).rev() {
            let kd = (rem % side) as i64 - trunc as i64;
            rem /= side;
            let wrapped = kd.rem_euclid(n_side as i64) as usize;
            off += wrapped * n_side.pow((axes - 1 - d) as u32);
        }
        *slot = spec[off];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_round_trip() {
        let n = 8;
        let fft = GridFft::new(n, 2);
        // f(x) = e^{2 pi i (x0 - 2 x1)}
        let mut data = vec![Complex64::default(); n * n];
        for i0 in 0..n {
            for i1 in 0..n {
                let x0 = i0 as f64 / n as f64;
                let x1 = i1 as f64 / n as f64;
                let phase = 2.0 * std::f64::consts::PI * (x0 - 2.0 * x1);
                data[i0 * n + i1] = Complex64::new(phase.cos(), phase.sin());
            }
        }
        let samples = data.clone();
        fft.forward(&mut data);
        // coefficient sits at (1, -2) == (1, 6)
        for (i, v) in data.iter().enumerate() {
            let expect = if i == n + 6 { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12, "index {i}");
        }
        fft.backward(&mut data);
        for (a, b) in data.iter().zip(samples.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
