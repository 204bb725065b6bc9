use serde::{Deserialize, Serialize};

use super::IntegrableSystem;
use crate::exact::RatMatrix;
use crate::sample::RationalSampler;

pub const SHAPES: &str = "shapes";
pub const FIRST_FIELD: &str = "first_field_is_b";
pub const COUNT: &str = "count";
pub const COMMUTATION: &str = "commutation";
pub const SYMMETRY: &str = "integral_symmetry";
pub const QUADRATIC_ANNIHILATION: &str = "quadratic_annihilation";
pub const LINEAR_ANNIHILATION: &str = "linear_annihilation";
pub const FIELD_INDEPENDENCE: &str = "field_independence";
pub const INTEGRAL_INDEPENDENCE: &str = "integral_independence";
pub const HAMILTONIAN_MEMBERSHIP: &str = "hamiltonian_membership";
pub const CASIMIR_MEMBERSHIP: &str = "casimir_membership";
pub const ISOTROPY: &str = "isotropy";

/// Extra seeded points tried when an independence rank falls short.
pub const RESAMPLES: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub checks: Vec<Check>,
    /// `Z_i` with `[B; D0] Z_i = [C_i; H_i]`.
    pub field_witnesses: Vec<Option<RatMatrix>>,
    /// `z_j` with `[B; D0] z_j = [0; c_j]`.
    pub casimir_witnesses: Vec<Option<RatMatrix>>,
}

impl Transcript {
    pub fn empty(seed: u64) -> Self {
        Transcript {
            seed,
            checks: Vec::new(),
            field_witnesses: Vec::new(),
            casimir_witnesses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        if failed.is_empty() {
            format!("{} checks passed", self.checks.len())
        } else {
            failed.join("; ")
        }
    }

    fn push(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status: CheckStatus::NotApplicable,
            detail: detail.into(),
        });
    }
}

fn listing(items: &[String]) -> String {
    if items.is_empty() {
        "ok".to_string()
    } else {
        items.join(", ")
    }
}

/// Rank of the vectors `f(u0)` at seeded points; returns the best rank seen
/// and the attempt that reached `target` (1-based).
fn seeded_rank(
    seed: u64,
    m: usize,
    target: usize,
    f: impl Fn(&RatMatrix) -> Vec<RatMatrix>,
) -> (usize, Option<u64>) {
    let mut best = 0;
    for attempt in 0..=RESAMPLES {
        let u0 = RationalSampler::new(seed.wrapping_add(attempt)).point(m);
        let vs = f(&u0);
        let r = if vs.is_empty() { 0 } else { RatMatrix::hstack(&vs).expect("columns").rank() };
        best = best.max(r);
        if r == target {
            return (r, Some(attempt + 1));
        }
    }
    (best, None)
}

/// Solutions `Z` of `stacked * Z = rhs` for each right-hand side; one
/// elimination when all are consistent.
fn stacked_witnesses(stacked: &RatMatrix, rhs: &[RatMatrix]) -> Vec<Option<RatMatrix>> {
    if rhs.is_empty() {
        return Vec::new();
    }
    let all = RatMatrix::hstack(rhs).expect("same height");
    if let Ok(Some(z)) = stacked.solve_linear(&all) {
        let mut out = Vec::with_capacity(rhs.len());
        let mut col = 0;
        for r in rhs {
            out.push(Some(z.submatrix(0, col, z.rows(), r.cols())));
            col += r.cols();
        }
        return out;
    }
    rhs.iter().map(|r| stacked.solve_linear(r).ok().flatten()).collect()
}

/// Independent re-check of every defining property of an integrable system.
pub fn verify_system(sys: &IntegrableSystem) -> Transcript {
    let mut t = Transcript::empty(sys.seed);
    let m = sys.b.rows();
    let square = |a: &RatMatrix| a.rows() == m && a.cols() == m;
    let shapes_ok = square(&sys.b)
        && square(&sys.d0)
        && sys.vector_fields.iter().all(square)
        && sys.field_hamiltonians.iter().all(square)
        && sys.field_hamiltonians.len() == sys.vector_fields.len()
        && sys.quadratic_integrals.iter().all(square)
        && sys.linear_integrals.iter().all(|l| l.c.len() == m);
    t.push(SHAPES, shapes_ok, if shapes_ok { "ok".to_string() } else { format!("expected {m}x{m}") });
    if !shapes_ok {
        return t;
    }
    let fields = &sys.vector_fields;
    let quads = &sys.quadratic_integrals;
    let lins: Vec<RatMatrix> = sys.linear_integrals.iter().map(|l| RatMatrix::column(l.c.clone())).collect();
    let (p, q) = (fields.len(), quads.len() + lins.len());

    let first_ok = fields.first() == Some(&sys.b);
    t.push(FIRST_FIELD, first_ok, if first_ok { "C1 = B" } else { "C1 differs from B" });
    t.push(
        COUNT,
        p >= 1 && p + q == m,
        format!("p = {p}, q = {q}, m = {m}"),
    );

    let mut bad = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if !fields[i].commutator(&fields[j]).is_zero() {
                bad.push(format!("[C{}, C{}]", i + 1, j + 1));
            }
        }
    }
    t.push(COMMUTATION, bad.is_empty(), listing(&bad));

    let asym: Vec<String> = quads
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_symmetric())
        .map(|(j, _)| format!("S{}", j + 1))
        .collect();
    t.push(SYMMETRY, asym.is_empty(), listing(&asym));

    let mut bad = Vec::new();
    for (j, s) in quads.iter().enumerate() {
        for (i, c) in fields.iter().enumerate() {
            if !(s * c).is_skew() {
                bad.push(format!("S{} C{}", j + 1, i + 1));
            }
        }
    }
    t.push(QUADRATIC_ANNIHILATION, bad.is_empty(), listing(&bad));

    let mut bad = Vec::new();
    for (j, c) in lins.iter().enumerate() {
        for (i, f) in fields.iter().enumerate() {
            if !(&c.transpose() * f).is_zero() {
                bad.push(format!("c{} C{}", j + 1, i + 1));
            }
        }
    }
    t.push(LINEAR_ANNIHILATION, bad.is_empty(), listing(&bad));

    if p == 1 && sys.b.is_zero() && fields[0].is_zero() {
        t.skip(FIELD_INDEPENDENCE, "B = 0 contributes only the zero field");
    } else {
        let (r, hit) = seeded_rank(sys.seed, m, p, |u0| fields.iter().map(|c| c * u0).collect());
        t.push(
            FIELD_INDEPENDENCE,
            hit.is_some(),
            match hit {
                Some(a) => format!("rank {r} of {p} at point {a}"),
                None => format!("rank {r} of {p} after {} points", RESAMPLES + 1),
            },
        );
    }
    let (r, hit) = seeded_rank(sys.seed, m, q, |u0| {
        quads.iter().map(|s| s * u0).chain(lins.iter().cloned()).collect()
    });
    t.push(
        INTEGRAL_INDEPENDENCE,
        hit.is_some(),
        match hit {
            Some(a) => format!("rank {r} of {q} at point {a}"),
            None => format!("rank {r} of {q} after {} points", RESAMPLES + 1),
        },
    );

    let stacked = RatMatrix::vstack(&sys.b, &sys.d0).expect("same width");
    let rhs: Vec<RatMatrix> = fields
        .iter()
        .zip(&sys.field_hamiltonians)
        .map(|(c, h)| RatMatrix::vstack(c, h).expect("same width"))
        .collect();
    t.field_witnesses = stacked_witnesses(&stacked, &rhs);
    let mut bad = Vec::new();
    for (i, (h, z)) in sys.field_hamiltonians.iter().zip(&t.field_witnesses).enumerate() {
        if !h.is_symmetric() || z.is_none() {
            bad.push(format!("C{}", i + 1));
        }
    }
    t.push(HAMILTONIAN_MEMBERSHIP, bad.is_empty(), listing(&bad));

    let rhs: Vec<RatMatrix> = lins
        .iter()
        .map(|c| RatMatrix::vstack(&RatMatrix::zeros(m, 1), c).expect("same width"))
        .collect();
    t.casimir_witnesses = stacked_witnesses(&stacked, &rhs);
    let bad: Vec<String> = t
        .casimir_witnesses
        .iter()
        .enumerate()
        .filter(|(_, z)| z.is_none())
        .map(|(j, _)| format!("c{}", j + 1))
        .collect();
    if lins.is_empty() {
        t.skip(CASIMIR_MEMBERSHIP, "no linear integrals");
    } else {
        t.push(CASIMIR_MEMBERSHIP, bad.is_empty(), listing(&bad));
    }

    match sys.b.inverse() {
        Ok(inv) => {
            let omega = &sys.d0 * &inv;
            let mut bad = Vec::new();
            for (i, ci) in fields.iter().enumerate() {
                let left = &ci.transpose() * &omega;
                for (j, cj) in fields.iter().enumerate().skip(i) {
                    if !(&left * cj).is_skew() {
                        bad.push(format!("C{}^t omega C{}", i + 1, j + 1));
                    }
                }
            }
            t.push(ISOTROPY, bad.is_empty(), listing(&bad));
        }
        Err(_) => t.skip(ISOTROPY, "B is singular"),
    }
    t
}
