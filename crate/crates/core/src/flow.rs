//! Fixed-step RK4 on `u' = Bu`, tracking `H = 1/2 u^t D u` and linear Casimirs.

use serde::{Deserialize, Serialize};

use crate::exact::{rational_to_f64, RatMatrix, Rational};
use crate::sample::RationalSampler;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub t_max: f64,
    pub steps: usize,
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            t_max: 10.0,
            steps: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub h: f64,
    pub casimirs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    pub start: Vec<f64>,
    pub samples: Vec<FlowSample>,
}

struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn new(m: &RatMatrix) -> Self {
        Dense {
            n: m.cols(),
            a: m.entries().iter().map(rational_to_f64).collect(),
        }
    }

    fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.a.chunks(self.n).map(|row| row.iter().zip(u).map(|(x, y)| x * y).sum()).collect()
    }
}

fn axpy(u: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    u.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Start point has entries uniform in `[-1, 1)` from `cfg.seed`.
pub fn run_flow(b: &RatMatrix, d: &RatMatrix, casimirs: &[Vec<Rational>], cfg: &FlowConfig) -> FlowRun {
    let m = b.rows();
    let mut rng = RationalSampler::new(cfg.seed);
    let start: Vec<f64> = (0..m).map(|_| 2.0 * rng.unit_f64() - 1.0).collect();
    let (bd, dd) = (Dense::new(b), Dense::new(d));
    let cs: Vec<Vec<f64>> = casimirs.iter().map(|c| c.iter().map(rational_to_f64).collect()).collect();
    let sample = |t: f64, u: &[f64]| FlowSample {
        t,
        h: 0.5 * dot(u, &dd.apply(u)),
        casimirs: cs.iter().map(|c| dot(c, u)).collect(),
    };
    let dt = cfg.t_max / cfg.steps as f64;
    let mut u = start.clone();
    let mut samples = vec![sample(0.0, &u)];
    for step in 1..=cfg.steps {
        let k1 = bd.apply(&u);
        let k2 = bd.apply(&axpy(&u, dt / 2.0, &k1));
        let k3 = bd.apply(&axpy(&u, dt / 2.0, &k2));
        let k4 = bd.apply(&axpy(&u, dt, &k3));
        for i in 0..m {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        samples.push(sample(step as f64 * dt, &u));
    }
    FlowRun { start, samples }
}

impl FlowRun {
    /// `max_t |X(t) - X(0)| / max(1, |X(0)|)` for `H`, then each Casimir.
    pub fn relative_drift(&self) -> Vec<f64> {
        let first = &self.samples[0];
        let columns = 1 + first.casimirs.len();
        (0..columns)
            .map(|k| {
                let pick = |s: &FlowSample| if k == 0 { s.h } else { s.casimirs[k - 1] };
                let x0 = pick(first);
                self.samples.iter().map(|s| (pick(s) - x0).abs()).fold(0.0, f64::max) / x0.abs().max(1.0)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let k = self.samples.first().map_or(0, |s| s.casimirs.len());
        let mut out = String::from("# RK4 on u' = Bu; H and Casimirs are exactly conserved, drift is integrator error only\n");
        out.push_str("t,H");
        for j in 1..=k {
            out.push_str(&format!(",casimir_{j}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e}", s.t, s.h));
            for c in &s.casimirs {
                out.push_str(&format!(",{c:e}"));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn oscillator_energy() {
        let b = RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let run = run_flow(&b, &RatMatrix::identity(2), &[], &FlowConfig::default());
        assert_eq!(run.samples.len(), 10_001);
        assert!(run.relative_drift()[0] < 1e-9);
    }

    #[test]
    fn zero_dynamics_is_constant() {
        let b = RatMatrix::zeros(2, 2);
        let run = run_flow(&b, &RatMatrix::identity(2), &[vec![rat(1), rat(0)]], &FlowConfig::default());
        assert!(run.relative_drift().iter().all(|d| *d == 0.0));
        assert!(run.to_csv().lines().nth(1).unwrap() == "t,H,casimir_1");
    }
}
