use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, serde_rational, Assignment, ExactError, Rational};

/// Affine-linear form `constant + sum(coeff * param)` over named parameters.
///
/// Zero coefficients are never stored, so two forms are equal exactly when
/// they agree as functions.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinForm {
    #[serde(with = "serde_rational")]
    constant: Rational,
    #[serde(with = "terms_serde")]
    terms: BTreeMap<String, Rational>,
}

impl LinForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        LinForm {
            constant: value,
            terms: BTreeMap::new(),
        }
    }

    /// The form `coeff * name`.
    pub fn term(name: impl Into<String>, coeff: Rational) -> Self {
        let mut f = Self::zero();
        f.add_term(name.into(), coeff);
        f
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::term(name, Rational::one())
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn coefficient(&self, name: &str) -> Rational {
        self.terms.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, name: String, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(name) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        LinForm {
            constant: &self.constant * factor,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    /// `self + factor * other`, in place.
    pub fn add_scaled(&mut self, other: &LinForm, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        self.constant += &other.constant * factor;
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * factor);
        }
    }

    /// Replaces the assigned parameters by their values; the rest stay symbolic.
    pub fn substitute(&self, assignment: &Assignment) -> Self {
        let mut out = LinForm::constant(self.constant.clone());
        for (k, v) in &self.terms {
            match assignment.get(k) {
                Some(value) => out.constant += v * value,
                None => out.add_term(k.clone(), v.clone()),
            }
        }
        out
    }

    /// Full evaluation. Every parameter must be assigned.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, ExactError> {
        let mut acc = self.constant.clone();
        for (k, v) in &self.terms {
            let value = assignment
                .get(k)
                .ok_or_else(|| ExactError::UnassignedParameter(k.clone()))?;
            acc += v * value;
        }
        Ok(acc)
    }

    pub(crate) fn collect_params(&self, into: &mut BTreeSet<String>) {
        into.extend(self.terms.keys().cloned());
    }
}

impl From<Rational> for LinForm {
    fn from(value: Rational) -> Self {
        LinForm::constant(value)
    }
}

impl Add for &LinForm {
    type Output = LinForm;

    fn add(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &LinForm {
    type Output = LinForm;

    fn sub(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &LinForm {
    type Output = LinForm;

    fn neg(self) -> LinForm {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for &LinForm {
    type Output = LinForm;

    fn mul(self, rhs: &Rational) -> LinForm {
        self.scale(rhs)
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{}", format_rational(&self.constant));
        }
        let mut first = true;
        if !self.constant.is_zero() {
            write!(f, "{}", format_rational(&self.constant))?;
            first = false;
        }
        for (name, c) in &self.terms {
            let negative = *c < Rational::zero();
            let magnitude = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}*{name}", format_rational(&magnitude))?;
            }
            first = false;
        }
        Ok(())
    }
}

mod terms_serde {
    use std::collections::BTreeMap;

    use num_traits::Zero;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(terms: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(terms.len()))?;
        for (k, v) in terms {
            map.serialize_entry(k, &format_rational(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let value = parse_rational(&v).map_err(serde::de::Error::custom)?;
            if !value.is_zero() {
                out.insert(k, value);
            }
        }
        Ok(out)
    }
}
