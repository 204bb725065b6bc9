use serde::{Deserialize, Serialize};

use crate::dsolver::span_misses;
use crate::exact::{rat, LinForm, ParamMatrix, RatMatrix, Rational};
use crate::jordan::{JordanSpec, PlacedBlock};

/// All matrices commuting with the realized `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantFamily {
    pub general: ParamMatrix,
    pub dim: usize,
    pub basis: Vec<RatMatrix>,
}

/// Same eigenvalue: same group, and same side for paired kinds.
fn same_eigenvalue(x: &PlacedBlock, y: &PlacedBlock) -> bool {
    x.group == y.group && (!x.kind.is_paired() || x.side == y.side)
}

/// Toeplitz coupling of `x` (rows) and `y` (columns): constant along the
/// diagonals `l - k = delta` for `delta` in `max(0, q - p)..q`.
fn toeplitz_params(prefix: &str, x: &PlacedBlock, y: &PlacedBlock, out: &mut ParamMatrix) {
    let (p, q) = (x.size, y.size);
    let cell = x.cell();
    for delta in q.saturating_sub(p)..q {
        // anchor: topmost entry of the diagonal
        let row = x.offset + 1;
        let col = y.offset + cell * delta + 1;
        let labels: &[&str] = if cell == 1 { &["c"] } else { &["ca", "cb"] };
        for (which, label) in labels.iter().enumerate() {
            let name = format!("{prefix}.{label}_{row}_{col}");
            out.declare(&name);
            for k in 1..=p.min(q - delta) {
                let l = k + delta;
                let (i0, j0) = (x.offset + cell * (k - 1), y.offset + cell * (l - 1));
                // cells are alpha I (ca) or beta K (cb), K = [[0, 1], [-1, 0]]
                let entries: Vec<(usize, usize, i64)> = match (cell, which) {
                    (1, _) => vec![(0, 0, 1)],
                    (_, 0) => vec![(0, 0, 1), (1, 1, 1)],
                    _ => vec![(0, 1, 1), (1, 0, -1)],
                };
                for (a, b, v) in entries {
                    let mut f = out.get(i0 + a, j0 + b).clone();
                    f.add_scaled(&LinForm::param(name.clone()), &rat(v));
                    out.set(i0 + a, j0 + b, f);
                }
            }
        }
    }
}

/// Closed-form commutant: zero between different eigenvalues, Toeplitz
/// (rotation-Toeplitz for complex kinds) within.
pub fn commutant(spec: &JordanSpec) -> CommutantFamily {
    let m = spec.dim();
    let mut general = ParamMatrix::zeros(m, m);
    for x in spec.layout() {
        for y in spec.layout() {
            if same_eigenvalue(x, y) {
                toeplitz_params(&format!("g{}", x.group + 1), x, y, &mut general);
            }
        }
    }
    let basis: Vec<RatMatrix> = general
        .params()
        .iter()
        .map(|p| general.coefficient_matrix(p))
        .collect();
    CommutantFamily {
        dim: basis.len(),
        general,
        basis,
    }
}

/// Kernel of `X -> BX - XB` over all `m^2` entries.
pub fn sylvester_oracle(b: &RatMatrix) -> Vec<RatMatrix> {
    let m = b.rows();
    let var = |i: usize, j: usize| i * m + j;
    let mut rows = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut r: Vec<Rational> = vec![rat(0); m * m];
            for k in 0..m {
                r[var(k, j)] += b.get(i, k);
                r[var(i, k)] -= b.get(k, j);
            }
            rows.push(r);
        }
    }
    let system = RatMatrix::from_rows(rows).expect("rectangular");
    system
        .kernel_basis()
        .into_iter()
        .map(|v| RatMatrix::from_fn(m, m, |i, j| v.get(var(i, j), 0).clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantComparison {
    pub closed_dim: usize,
    pub oracle_dim: usize,
    pub closed_rank: usize,
    pub outside_span: usize,
    pub agrees: bool,
}

pub fn compare_commutant(closed: &CommutantFamily, oracle: &[RatMatrix]) -> CommutantComparison {
    let cv: Vec<RatMatrix> = closed.basis.iter().map(RatMatrix::vectorize).collect();
    let ov: Vec<RatMatrix> = oracle.iter().map(RatMatrix::vectorize).collect();
    let closed_rank = if cv.is_empty() { 0 } else { RatMatrix::hstack(&cv).expect("same length").rank() };
    let outside_span = span_misses(&ov, &cv).len();
    CommutantComparison {
        closed_dim: closed.dim,
        oracle_dim: oracle.len(),
        closed_rank,
        outside_span,
        agrees: closed.dim == oracle.len() && closed_rank == closed.dim && outside_span == 0,
    }
}
