//! Three-dimensional complex FFT on the cubic grid, built from cached
//! one-dimensional `rustfft` plans applied axis by axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft3 {
    pub(crate) fn get(n: usize) -> Arc<Fft3> {
        let mut map = cache().lock().expect("fft cache poisoned");
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    /// Unnormalized forward transform, in place.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the 1/n³ normalization, in place.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let plane = n * n;
        assert_eq!(data.len(), plane * n);

        // z lines are contiguous
        data.par_chunks_mut(plane).for_each(|chunk| plan.process(chunk));

        // y lines: transpose each x-plane, transform, transpose back
        data.par_chunks_mut(plane).for_each(|chunk| {
            let mut buf = vec![Complex64::default(); plane];
            for j in 0..n {
                for k in 0..n {
                    buf[k * n + j] = chunk[j * n + k];
                }
            }
            plan.process(&mut buf);
            for j in 0..n {
                for k in 0..n {
                    chunk[j * n + k] = buf[k * n + j];
                }
            }
        });

        // x lines: global transpose into (j, k, i) order
        let mut tmp = vec![Complex64::default(); data.len()];
        {
            let src = &*data;
            tmp.par_chunks_mut(plane).enumerate().for_each(|(j, out)| {
                for k in 0..n {
                    for i in 0..n {
                        out[k * n + i] = src[(i * n + j) * n + k];
                    }
                }
            });
        }
        tmp.par_chunks_mut(plane).for_each(|chunk| plan.process(chunk));
        data.par_chunks_mut(plane).enumerate().for_each(|(i, out)| {
            for j in 0..n {
                for k in 0..n {
                    out[j * n + k] = tmp[(j * n + k) * n + i];
                }
            }
        });
    }
}
