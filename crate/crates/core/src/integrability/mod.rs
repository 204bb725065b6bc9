//! Hamiltonian integrable systems `u' = Bu` with respect to a fixed `(B, D0)`.

mod commutant;
mod units;
mod verify;

pub use commutant::{commutant, compare_commutant, sylvester_oracle, CommutantComparison, CommutantFamily};
pub use units::{pair_blocks, Pairing};
pub use verify::{
    verify_system, Check, CheckStatus, Transcript, CASIMIR_MEMBERSHIP, COMMUTATION, COUNT, FIELD_INDEPENDENCE,
    FIRST_FIELD, HAMILTONIAN_MEMBERSHIP, INTEGRAL_INDEPENDENCE, ISOTROPY, LINEAR_ANNIHILATION,
    QUADRATIC_ANNIHILATION, RESAMPLES, SHAPES, SYMMETRY,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify, StructureClass};
use crate::exact::{one, serde_rational_vec, zero, RatMatrix, Rational};
use crate::jordan::JordanSpec;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum IntegrabilityError {
    #[error("verification failed: {}", .0.transcript.summary())]
    Verification(Box<IntegrableSystem>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearIntegral {
    #[serde(with = "serde_rational_vec")]
    pub c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub label: String,
    /// 1-based coordinates.
    pub coords: Vec<usize>,
    pub fields: usize,
    pub integrals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrableSystem {
    pub dim: usize,
    pub p: usize,
    pub q: usize,
    pub b: RatMatrix,
    pub d0: RatMatrix,
    /// `C_1 = B` first.
    pub vector_fields: Vec<RatMatrix>,
    /// `H_i` with `(C_i u, H_i u)` in the Dirac structure of `(B, D0)`.
    pub field_hamiltonians: Vec<RatMatrix>,
    /// `S_j`, integral `1/2 u^t S_j u`.
    pub quadratic_integrals: Vec<RatMatrix>,
    /// `c_j`, integral `c_j^t u`.
    pub linear_integrals: Vec<LinearIntegral>,
    pub units: Vec<UnitSummary>,
    pub structure: StructureClass,
    pub seed: u64,
    pub transcript: Transcript,
}

impl IntegrableSystem {
    /// Recomputes the transcript after the matrices were edited.
    pub fn reverify(&mut self) {
        self.p = self.vector_fields.len();
        self.q = self.quadratic_integrals.len() + self.linear_integrals.len();
        self.transcript = verify_system(self);
    }
}

/// Builds the system and its transcript without judging it.
pub fn construct_integrable(spec: &JordanSpec, seed: u64) -> IntegrableSystem {
    let m = spec.dim();
    let b = spec.realize();
    let us = units::units(spec);
    let mut d0 = RatMatrix::zeros(m, m);
    for u in &us {
        d0 = &d0 + &u.d0.embed(m, &u.coords);
    }
    let mut vector_fields = vec![b.clone()];
    let mut field_hamiltonians = vec![d0.clone()];
    let mut quadratic_integrals = Vec::new();
    let mut linear = Vec::new();
    // B replaces the local B of the first unit that has fields
    let mut replaced = false;
    for u in &us {
        let skip = if !replaced && !u.fields.is_empty() {
            replaced = true;
            1
        } else {
            0
        };
        for (c, z) in u.fields.iter().skip(skip) {
            vector_fields.push(c.embed(m, &u.coords));
            field_hamiltonians.push((&u.d0 * z).embed(m, &u.coords));
        }
        quadratic_integrals.extend(u.quadratic.iter().map(|s| s.embed(m, &u.coords)));
        for c in &u.linear {
            let mut full = vec![zero(); m];
            for (a, &i) in u.coords.iter().enumerate() {
                full[i] = c.get(a, 0).clone();
            }
            linear.push(LinearIntegral { c: full });
        }
    }
    if !replaced {
        // B = 0: the zero field takes the place of one Casimir
        linear.pop();
    }
    let units = us
        .iter()
        .map(|u| UnitSummary {
            label: u.label.clone(),
            coords: u.coords.iter().map(|i| i + 1).collect(),
            fields: u.fields.len(),
            integrals: u.quadratic.len() + u.linear.len(),
        })
        .collect();
    let structure = classify(&b, &d0).expect("D0 lies in the solution family");
    let mut sys = IntegrableSystem {
        dim: m,
        p: 0,
        q: 0,
        b,
        d0,
        vector_fields,
        field_hamiltonians,
        quadratic_integrals,
        linear_integrals: linear,
        units,
        structure,
        seed,
        transcript: Transcript::empty(seed),
    };
    sys.reverify();
    sys
}

/// Builds and verifies; a failing transcript is an error carrying the system.
pub fn build_integrable(spec: &JordanSpec) -> Result<IntegrableSystem, IntegrabilityError> {
    build_integrable_seeded(spec, DEFAULT_SEED)
}

pub fn build_integrable_seeded(spec: &JordanSpec, seed: u64) -> Result<IntegrableSystem, IntegrabilityError> {
    let sys = construct_integrable(spec, seed);
    if sys.transcript.passed() {
        Ok(sys)
    } else {
        Err(IntegrabilityError::Verification(Box::new(sys)))
    }
}

/// Negative control: adds a unit matrix `E_kl` to one field so that it stops
/// commuting with another (the last field when possible). With a single
/// field, `C_1 = B` is broken instead. Returns the tampered system and the
/// check expected to fail.
pub fn tamper_field(sys: &IntegrableSystem) -> (IntegrableSystem, &'static str) {
    let m = sys.dim;
    let fields = &sys.vector_fields;
    let units = || (0..m).flat_map(|k| (0..m).map(move |l| RatMatrix::unit(m, m, k, l)));
    let hit = (0..fields.len()).rev().find_map(|i| {
        units()
            .find(|e| fields.iter().enumerate().any(|(j, c)| j != i && !e.commutator(c).is_zero()))
            .map(|e| (i, e))
    });
    let mut out = sys.clone();
    let name = match hit {
        Some((i, e)) => {
            out.vector_fields[i] = &out.vector_fields[i] + &e;
            COMMUTATION
        }
        None => {
            out.vector_fields[0] = &out.vector_fields[0] + &RatMatrix::unit(m, m, 0, 0);
            FIRST_FIELD
        }
    };
    out.reverify();
    (out, name)
}

/// Negative control: adds `E_kk` to the first quadratic integral (or `e_k`
/// to the first linear one), with row `k` of `B` nonzero. `None` when `q = 0`.
pub fn tamper_integral(sys: &IntegrableSystem) -> Option<(IntegrableSystem, &'static str)> {
    let m = sys.dim;
    let mut out = sys.clone();
    let k = (0..m).find(|&k| sys.b.row(k).iter().any(|v| *v != zero())).unwrap_or(0);
    if let Some(s) = out.quadratic_integrals.first_mut() {
        *s = &*s + &RatMatrix::unit(m, m, k, k);
        out.reverify();
        Some((out, QUADRATIC_ANNIHILATION))
    } else {
        let c = &mut out.linear_integrals.first_mut()?.c;
        c[k] += one();
        out.reverify();
        Some((out, LINEAR_ANNIHILATION))
    }
}
