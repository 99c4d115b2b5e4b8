//! Adaptive Dormand-Prince 5(4) integrator.
//!
//! Steps land exactly on every requested sample time, so no dense output
//! is needed. Systems can veto a step (e.g. one that produced negative
//! occupancies) and project the state after every accepted step.

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Whether a trial state is admissible. Rejected steps are retried
    /// with half the step size.
    fn admissible(&self, _y: &[f64]) -> bool {
        true
    }

    /// Post-step projection; returns true if `y` was modified.
    fn project(&self, _y: &mut [f64]) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrator {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator { rtol: 1e-6, atol: 1e-9, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

struct Work {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Integrator {
    /// Integrates `y` in place from `t0` through every time in `samples`
    /// (non-decreasing from `t0`, strictly increasing among themselves),
    /// calling `observe` at each one.
    pub fn integrate<S, F>(&self, sys: &S, t0: f64, y: &mut [f64], samples: &[f64], mut observe: F) -> Result<Stats>
    where
        S: OdeSystem + ?Sized,
        F: FnMut(f64, &[f64]),
    {
        let n = sys.dim();
        assert_eq!(y.len(), n, "state length does not match system dimension");
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("sample times must be strictly increasing".into()));
        }
        if samples.first().is_some_and(|&s| s < t0) || samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Parameter("sample times must be finite and not precede t0".into()));
        }

        let mut w = Work { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n], y_new: vec![0.0; n] };
        let mut stats = Stats::default();
        let mut t = t0;
        sys.rhs(t, y, &mut w.k[0]);
        stats.rhs_evals += 1;
        let mut h = initial_step(self, y, &w.k[0], samples.last().copied().unwrap_or(t0) - t0);

        for &target in samples {
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::Integration { t, component: 0 });
                }
                let remaining = target - t;
                let last = h >= remaining;
                let h_try = if last { remaining } else { h };

                let (err, worst) = self.trial_step(sys, t, y, h_try, &mut w);
                stats.rhs_evals += 6;
                let ok = err <= 1.0 && sys.admissible(&w.y_new);
                if ok {
                    stats.accepted += 1;
                    t = if last { target } else { t + h_try };
                    y.copy_from_slice(&w.y_new);
                    if sys.project(y) {
                        sys.rhs(t, y, &mut w.k[0]);
                        stats.rhs_evals += 1;
                    } else {
                        // first-same-as-last
                        w.k.swap(0, 6);
                    }
                    let factor = if err == 0.0 { MAX_FACTOR } else { SAFETY * err.powf(-0.2) };
                    let grown = h_try * factor.clamp(MIN_FACTOR, MAX_FACTOR);
                    // a step shortened to hit a sample does not shrink the next one
                    h = if last { grown.max(h) } else { grown };
                } else {
                    stats.rejected += 1;
                    let factor = if err.is_finite() && err > 1.0 {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                    } else {
                        0.5
                    };
                    h = h_try * factor;
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::Integration { t, component: worst });
                    }
                }
            }
            observe(t, y);
        }
        Ok(stats)
    }

    /// One Dormand-Prince step into `w.y_new`; returns the scaled max-norm
    /// error estimate and the component attaining it.
    fn trial_step<S: OdeSystem + ?Sized>(&self, sys: &S, t: f64, y: &[f64], h: f64, w: &mut Work) -> (f64, usize) {
        let Work { k, tmp, y_new } = w;
        let [k1, k2, k3, k4, k5, k6, k7] = k;

        stage(tmp, y, h, &[(A21, &k1[..])]);
        sys.rhs(t + C2 * h, tmp, k2);
        stage(tmp, y, h, &[(A31, &k1[..]), (A32, &k2[..])]);
        sys.rhs(t + C3 * h, tmp, k3);
        stage(tmp, y, h, &[(A41, &k1[..]), (A42, &k2[..]), (A43, &k3[..])]);
        sys.rhs(t + C4 * h, tmp, k4);
        stage(tmp, y, h, &[(A51, &k1[..]), (A52, &k2[..]), (A53, &k3[..]), (A54, &k4[..])]);
        sys.rhs(t + C5 * h, tmp, k5);
        stage(tmp, y, h, &[(A61, &k1[..]), (A62, &k2[..]), (A63, &k3[..]), (A64, &k4[..]), (A65, &k5[..])]);
        sys.rhs(t + h, tmp, k6);
        stage(y_new, y, h, &[(A71, &k1[..]), (A73, &k3[..]), (A74, &k4[..]), (A75, &k5[..]), (A76, &k6[..])]);
        sys.rhs(t + h, y_new, k7);

        let mut err = 0.0f64;
        let mut worst = 0;
        for i in 0..y.len() {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            let r = (e / scale).abs();
            if r > err || r.is_nan() {
                err = if r.is_nan() { f64::INFINITY } else { r };
                worst = i;
            }
        }
        (err, worst)
    }
}

fn stage(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    out.copy_from_slice(y);
    for (coef, k) in terms {
        let c = h * coef;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += c * ki;
        }
    }
}

fn initial_step(cfg: &Integrator, y: &[f64], f0: &[f64], span: f64) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = cfg.atol + cfg.rtol * yi.abs();
        d0 = d0.max((yi / sc).abs());
        d1 = d1.max((fi / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    if span > 0.0 {
        h.min(span)
    } else {
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    // three-state cycle; the sum of the components is conserved
    struct Cycle;
    impl OdeSystem for Cycle {
        fn dim(&self) -> usize {
            3
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -2.0 * y[0] + 0.5 * y[2];
            dy[1] = 2.0 * y[0] - 3.0 * y[1];
            dy[2] = 3.0 * y[1] - 0.5 * y[2];
        }
    }

    struct BlowUp;
    impl OdeSystem for BlowUp {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn exponential_decay() {
        let mut y = vec![1.0];
        let samples: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let mut seen = Vec::new();
        Integrator::default().integrate(&Decay, 0.0, &mut y, &samples, |t, y| seen.push((t, y[0]))).unwrap();
        assert_eq!(seen.len(), samples.len());
        for ((t, v), s) in seen.iter().zip(&samples) {
            assert_eq!(t, s, "lands exactly on sample times");
            assert!((v - (-t).exp()).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn oscillator_accuracy() {
        let mut y = vec![0.0, 1.0];
        let cfg = Integrator { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        cfg.integrate(&Oscillator, 0.0, &mut y, &[10.0], |_, _| {}).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-8);
        assert!((y[1] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn linear_invariant_preserved() {
        let mut y = vec![1.0, 0.0, 0.0];
        Integrator::default()
            .integrate(&Cycle, 0.0, &mut y, &[1.0, 5.0, 20.0], |_, y| {
                assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            })
            .unwrap();
    }

    #[test]
    fn blow_up_reports_underflow() {
        let mut y = vec![1.0];
        let err = Integrator::default().integrate(&BlowUp, 0.0, &mut y, &[2.0], |_, _| {}).unwrap_err();
        match err {
            Error::Integration { t, component } => {
                assert!((t - 1.0).abs() < 1e-3, "t = {t}");
                assert_eq!(component, 0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_bad_sample_times() {
        let mut y = vec![1.0];
        assert!(Integrator::default().integrate(&Decay, 0.0, &mut y, &[1.0, 1.0], |_, _| {}).is_err());
        assert!(Integrator::default().integrate(&Decay, 1.0, &mut y, &[0.5], |_, _| {}).is_err());
    }
}
