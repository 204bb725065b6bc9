//! Structure classification of a pair `(B, D)` and its conserved quantities.

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsolver::DFamily;
use crate::exact::{serde_rational_vec, Assignment, ExactError, RatMatrix, Rational};
use crate::jordan::{BlockKind, JordanSpec, PlacedBlock};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("B is {b_rows}x{b_cols} but D is {d_rows}x{d_cols}")]
    Shape {
        b_rows: usize,
        b_cols: usize,
        d_rows: usize,
        d_cols: usize,
    },
    #[error("D is not symmetric at (1-based) {}", format_positions(.0))]
    NotSymmetric(Vec<(usize, usize)>),
    #[error("DB is not skew-symmetric at (1-based) {}", format_positions(.0))]
    NotSkew(Vec<(usize, usize)>),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn format_positions(list: &[(usize, usize)]) -> String {
    let shown: Vec<String> = list.iter().take(8).map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
    let more = if list.len() > 8 {
        format!(" and {} more", list.len() - 8)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Symplectic,
    Presymplectic,
    Poisson,
    Dirac,
    ProperBigIsotropic,
    Trivial,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Symplectic => "symplectic",
            Verdict::Presymplectic => "presymplectic",
            Verdict::Poisson => "poisson",
            Verdict::Dirac => "dirac",
            Verdict::ProperBigIsotropic => "proper_big_isotropic",
            Verdict::Trivial => "trivial",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureClass {
    pub verdict: Verdict,
    /// `DB != 0`: the Hamiltonian `1/2 u^t D u` actually generates `Bu`.
    pub dynamics_paired: bool,
    pub b_invertible: bool,
    pub d_invertible: bool,
    /// `omega = D B^-1`, present when `B` is invertible.
    pub omega: Option<RatMatrix>,
    /// `pi = B D^-1`, present when `D` is invertible.
    pub pi: Option<RatMatrix>,
    /// Nonzero `v` with `Bv = 0` and `Dv = 0`.
    pub witness: Option<RatMatrix>,
}

fn check_pair(b: &RatMatrix, d: &RatMatrix) -> Result<(), ClassifyError> {
    if !b.is_square() || b.rows() != d.rows() || b.cols() != d.cols() {
        return Err(ClassifyError::Shape {
            b_rows: b.rows(),
            b_cols: b.cols(),
            d_rows: d.rows(),
            d_cols: d.cols(),
        });
    }
    let asym = d.symmetry_violations();
    if !asym.is_empty() {
        return Err(ClassifyError::NotSymmetric(asym));
    }
    let db = d * b;
    let bad = db.skew_violations();
    if !bad.is_empty() {
        return Err(ClassifyError::NotSkew(bad));
    }
    Ok(())
}

/// Verdict order: trivial (`D = 0`), symplectic, presymplectic, Poisson,
/// Dirac, proper big-isotropic.
pub fn classify(b: &RatMatrix, d: &RatMatrix) -> Result<StructureClass, ClassifyError> {
    check_pair(b, d)?;
    let m = b.rows();
    let b_invertible = b.rank() == m;
    let d_invertible = d.rank() == m;
    let omega = if b_invertible { Some(d * &b.inverse()?) } else { None };
    let pi = if d_invertible { Some(b * &d.inverse()?) } else { None };
    let witness = RatMatrix::vstack(b, d)?.kernel_basis().into_iter().next();
    let verdict = if d.is_zero() {
        Verdict::Trivial
    } else if b_invertible && d_invertible {
        Verdict::Symplectic
    } else if b_invertible {
        Verdict::Presymplectic
    } else if d_invertible {
        Verdict::Poisson
    } else if witness.is_none() {
        Verdict::Dirac
    } else {
        Verdict::ProperBigIsotropic
    };
    Ok(StructureClass {
        verdict,
        dynamics_paired: !(d * b).is_zero(),
        b_invertible,
        d_invertible,
        omega,
        pi,
        witness: if verdict == Verdict::ProperBigIsotropic { witness } else { None },
    })
}

/// A linear Casimir `c^t u` with `c = D eta`, `B eta = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Casimir {
    #[serde(with = "serde_rational_vec")]
    pub c: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub eta: Vec<Rational>,
}

/// A constant isotropic field `B xi` with `D xi = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicField {
    #[serde(with = "serde_rational_vec")]
    pub field: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub xi: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservedReport {
    /// `S` in `H(u) = 1/2 u^t S u`.
    pub hamiltonian: RatMatrix,
    pub convention: String,
    pub casimirs: Vec<Casimir>,
    pub isotropic_fields: Vec<IsotropicField>,
}

/// Walks `sources` left to right and keeps those whose image is nonzero and
/// independent of the images kept so far.
fn leftmost_independent(sources: Vec<RatMatrix>, map: &RatMatrix) -> Vec<(RatMatrix, RatMatrix)> {
    let mut kept: Vec<(RatMatrix, RatMatrix)> = Vec::new();
    let mut images: Vec<RatMatrix> = Vec::new();
    for v in sources {
        let image = map * &v;
        if image.is_zero() {
            continue;
        }
        images.push(image.clone());
        if RatMatrix::hstack(&images).expect("same length").rank() == images.len() {
            kept.push((v, image));
        } else {
            images.pop();
        }
    }
    kept
}

pub fn conserved_report(b: &RatMatrix, d: &RatMatrix) -> Result<ConservedReport, ClassifyError> {
    check_pair(b, d)?;
    let casimirs = leftmost_independent(b.kernel_basis(), d)
        .into_iter()
        .map(|(eta, c)| Casimir {
            c: c.into_entries(),
            eta: eta.into_entries(),
        })
        .collect();
    let isotropic_fields = leftmost_independent(d.kernel_basis(), b)
        .into_iter()
        .map(|(xi, field)| IsotropicField {
            field: field.into_entries(),
            xi: xi.into_entries(),
        })
        .collect();
    Ok(ConservedReport {
        hamiltonian: d.clone(),
        convention: "H(u) = 1/2 u^T S u".to_string(),
        casimirs,
        isotropic_fields,
    })
}

/// Result of [`invertible_choice`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InvertibleChoice {
    Found {
        #[serde(with = "assignment_serde")]
        assignment: Assignment,
        d: RatMatrix,
    },
    Impossible(Obstruction),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    /// Zero-based group index in canonical order.
    pub group: usize,
    pub kind: BlockKind,
    pub reason: String,
    /// A column (zero-based) of the family that is identically zero, if any.
    pub zero_column: Option<usize>,
}

impl InvertibleChoice {
    pub fn is_found(&self) -> bool {
        matches!(self, InvertibleChoice::Found { .. })
    }
}

fn anti_diagonal_name(prefix: &str, label: &str, x: &PlacedBlock, y: &PlacedBlock) -> String {
    // first free anti-diagonal of the coupling, anchored in row 1 of `x`
    let row = x.offset + 1;
    let col = y.offset + x.cell() * (y.size - 1) + 1;
    format!("{prefix}.{label}_{row}_{col}")
}

/// Constructive choice of an invertible member of the family, group by group.
///
/// Nilpotent group: identity on the size-1 blocks, anti-diagonal on odd
/// blocks, cross anti-diagonal on equal pairs of even blocks; impossible when
/// some even size occurs an odd number of times. Paired groups: possible iff
/// both sides carry the same sizes. Single groups are never invertible.
pub fn invertible_choice(spec: &JordanSpec, family: &DFamily) -> InvertibleChoice {
    let mut assignment = Assignment::new();
    for (g, group) in spec.groups().iter().enumerate() {
        let prefix = format!("g{}", g + 1);
        let blocks: Vec<&PlacedBlock> = spec.group_blocks(g).collect();
        let kind = group.kind();
        let mut set = |name: String| {
            assignment.insert(name, Rational::one());
        };
        let impossible = |reason: String| {
            let coords = spec.group_coords(g);
            let zero_column = coords.into_iter().find(|&j| family.general.column_is_zero(j));
            InvertibleChoice::Impossible(Obstruction {
                group: g,
                kind,
                reason,
                zero_column,
            })
        };
        match kind {
            BlockKind::Zero => {
                let mut pending: Option<&PlacedBlock> = None;
                for x in &blocks {
                    if x.size % 2 == 1 {
                        set(anti_diagonal_name(&prefix, "d", x, x));
                        continue;
                    }
                    match pending.take() {
                        Some(y) if y.size == x.size => set(anti_diagonal_name(&prefix, "d", y, x)),
                        Some(y) => return impossible(format!("even nilpotent block of size {} is unpaired", y.size)),
                        None => pending = Some(x),
                    }
                }
                if let Some(y) = pending {
                    return impossible(format!("even nilpotent block of size {} is unpaired", y.size));
                }
            }
            BlockKind::RealPair | BlockKind::ComplexQuad => {
                let plus: Vec<&&PlacedBlock> = blocks.iter().filter(|b| b.side == crate::jordan::Side::Plus).collect();
                let minus: Vec<&&PlacedBlock> = blocks.iter().filter(|b| b.side == crate::jordan::Side::Minus).collect();
                let same = plus.len() == minus.len() && plus.iter().zip(&minus).all(|(x, y)| x.size == y.size);
                if !same {
                    return impossible("the two sides carry different Jordan sizes".to_string());
                }
                let label = if kind == BlockKind::RealPair { "d" } else { "alpha" };
                for (x, y) in plus.iter().zip(&minus) {
                    set(anti_diagonal_name(&prefix, label, x, y));
                }
            }
            BlockKind::Imaginary => {
                for x in &blocks {
                    let label = if x.size % 2 == 1 { "alpha" } else { "beta" };
                    set(anti_diagonal_name(&prefix, label, x, x));
                }
            }
            BlockKind::RealSingle | BlockKind::ComplexSingle => {
                return impossible("eigenvalues without a negated partner force a zero block".to_string());
            }
        }
    }
    let d = family
        .general
        .evaluate_or_zero(&assignment)
        .expect("choice only names family parameters");
    debug_assert!(d.is_invertible());
    InvertibleChoice::Found { assignment, d }
}

pub(crate) mod assignment_serde {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact::{format_rational, parse_rational, Assignment};

    pub fn serialize<S: Serializer>(a: &Assignment, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(a.len()))?;
        for (k, v) in a {
            map.serialize_entry(k, &format_rational(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Assignment, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| Ok((k, parse_rational(&v).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsolver::solve_family;
    use crate::exact::rat;
    use crate::jordan::BlockSpec;

    fn zero_spec(sizes: &[usize]) -> JordanSpec {
        JordanSpec::new(vec![BlockSpec::Zero { sizes: sizes.to_vec() }]).unwrap()
    }

    fn col(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| rat(v)).collect()
    }

    #[test]
    fn poisson_example() {
        let spec = zero_spec(&[2, 2]);
        let fam = solve_family(&spec);
        let d = fam.basis_by_name("g1.d_1_4");
        let class = classify(&spec.realize(), &d).unwrap();
        assert_eq!(class.verdict, Verdict::Poisson);
        let pi = RatMatrix::from_i64(&[&[0, 0, -1, 0], &[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 0]]);
        assert_eq!(class.pi, Some(pi));
        let report = conserved_report(&spec.realize(), &d).unwrap();
        let cs: Vec<Vec<Rational>> = report.casimirs.iter().map(|c| c.c.clone()).collect();
        assert_eq!(cs, vec![col(&[0, 0, 0, 1]), col(&[0, -1, 0, 0])]);
    }

    #[test]
    fn presymplectic_example() {
        let b = RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 1], &[0, 0, 0, -1]]);
        let d = RatMatrix::from_i64(&[&[0, 0, 0, 1], &[0, 0, 0, 0], &[0, 0, 0, 0], &[1, 0, 0, 0]]);
        let class = classify(&b, &d).unwrap();
        assert_eq!(class.verdict, Verdict::Presymplectic);
        let omega = RatMatrix::from_i64(&[&[0, 0, 0, -1], &[0, 0, 0, 0], &[0, 0, 0, 0], &[1, 0, 0, 0]]);
        assert_eq!(class.omega, Some(omega));
        let report = conserved_report(&b, &d).unwrap();
        let fields: Vec<Vec<Rational>> = report.isotropic_fields.iter().map(|f| f.field.clone()).collect();
        assert_eq!(fields, vec![col(&[0, 1, 0, 0]), col(&[0, 0, -1, 0])]);
        assert!(report.casimirs.is_empty());
    }

    #[test]
    fn degenerate_nilpotent_pair_is_proper() {
        let b = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let d = RatMatrix::from_i64(&[&[0, 0], &[0, 1]]);
        let class = classify(&b, &d).unwrap();
        assert_eq!(class.verdict, Verdict::ProperBigIsotropic);
        assert_eq!(class.witness, Some(RatMatrix::unit_vector(2, 0)));
        assert!(!class.dynamics_paired);
        assert_eq!(classify(&b, &RatMatrix::zeros(2, 2)).unwrap().verdict, Verdict::Trivial);
    }

    #[test]
    fn both_invertible_has_empty_report() {
        let b = RatMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        let d = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(classify(&b, &d).unwrap().verdict, Verdict::Symplectic);
        let report = conserved_report(&b, &d).unwrap();
        assert!(report.casimirs.is_empty() && report.isotropic_fields.is_empty());
    }

    #[test]
    fn contract_violations() {
        let b = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let nonsym = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(classify(&b, &nonsym), Err(ClassifyError::NotSymmetric(vec![(0, 1)])));
        let not_skew = RatMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert!(matches!(classify(&b, &not_skew), Err(ClassifyError::NotSkew(_))));
        let msg = classify(&b, &nonsym).unwrap_err().to_string();
        assert!(msg.contains("(1,2)"), "{msg}");
    }

    #[test]
    fn invertible_choices() {
        for (sizes, expect) in [(&[3][..], true), (&[2, 2][..], true), (&[2][..], false), (&[1, 3, 5][..], true)] {
            let spec = zero_spec(sizes);
            let fam = solve_family(&spec);
            let choice = invertible_choice(&spec, &fam);
            assert_eq!(choice.is_found(), expect, "{sizes:?}");
            if let InvertibleChoice::Found { d, .. } = &choice {
                assert!(d.is_invertible());
            }
        }
        let spec = zero_spec(&[2]);
        match invertible_choice(&spec, &solve_family(&spec)) {
            InvertibleChoice::Impossible(o) => assert_eq!(o.zero_column, Some(0)),
            other => panic!("{other:?}"),
        }
    }
}
