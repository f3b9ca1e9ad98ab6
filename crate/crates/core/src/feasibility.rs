//! Input validation, realizability classification and the flat construction.

use crate::{Error, Result};

/// Default relative tolerance for deciding `A_1 == sum_{i>1} A_i`.
pub const DEFAULT_TOL_EQ: f64 = 1e-12;

/// Positive areas sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaSpec {
    areas: Vec<f64>,
    /// `permutation[i]` is the input position of `areas[i]`.
    permutation: Vec<usize>,
}

impl AreaSpec {
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn n(&self) -> usize {
        self.areas.len()
    }

    pub fn total(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// `A_1`, the largest area.
    pub fn largest(&self) -> f64 {
        self.areas[0]
    }

    /// Areas in the order the caller originally supplied them.
    pub fn original_order(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (sorted, &orig) in self.permutation.iter().enumerate() {
            out[orig] = self.areas[sorted];
        }
        out
    }

    /// The same spec with every area multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> AreaSpec {
        AreaSpec {
            areas: self.areas.iter().map(|a| a * factor).collect(),
            permutation: self.permutation.clone(),
        }
    }
}

/// Validates `raw` and sorts it descending, remembering where each entry came from.
///
/// The sort is stable, so equal areas keep their input order.
pub fn make_area_spec(raw: &[f64]) -> Result<AreaSpec> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteArea { index });
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveArea { index, value });
        }
    }
    let mut permutation: Vec<usize> = (0..raw.len()).collect();
    permutation.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));
    let areas = permutation.iter().map(|&i| raw[i]).collect();
    Ok(AreaSpec { areas, permutation })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    /// `A_1` exceeds the sum of the others: no closed polyhedron exists.
    Infeasible,
    /// Equality: realized only by a doubly covered planar polygon.
    Flat,
    /// Strict inequality with `n >= 4`: a solid polyhedron exists.
    Solid,
    /// Three areas obeying the strict triangle inequality.
    TriangleOnly,
    /// Two equal areas.
    TwoFaceFlat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub tag: Tag,
    /// `sum_{i>1} A_i - A_1`.
    pub slack: f64,
}

/// Classifies `spec` by the sign of `sum_{i>1} A_i - A_1`, treating values
/// within `tol_eq * sum(A)` of zero as equality.
pub fn classify(spec: &AreaSpec, tol_eq: f64) -> Result<Classification> {
    let n = spec.n();
    if n <= 1 {
        return Err(Error::UnsupportedCount { n });
    }
    let rest: f64 = spec.areas[1..].iter().sum();
    let slack = rest - spec.areas[0];
    let band = tol_eq * spec.total();
    let tag = if slack.abs() <= band {
        if n == 2 {
            Tag::TwoFaceFlat
        } else {
            Tag::Flat
        }
    } else if slack < 0.0 {
        Tag::Infeasible
    } else {
        match n {
            // two unequal areas: the smaller face cannot cover the larger one
            2 => Tag::Infeasible,
            3 => Tag::TriangleOnly,
            _ => Tag::Solid,
        }
    };
    Ok(Classification { tag, slack })
}

/// The flat realization: a square of side `sqrt(A_1)` on one side and strips
/// of width `A_i / sqrt(A_1)` on the other.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatPolyhedron {
    pub side: f64,
    pub strip_widths: Vec<f64>,
    pub top_face_area: f64,
}

impl FlatPolyhedron {
    /// Area of each face in sorted order: the square first, then the strips.
    pub fn face_areas(&self) -> Vec<f64> {
        std::iter::once(self.top_face_area)
            .chain(self.strip_widths.iter().map(|w| w * self.side))
            .collect()
    }
}

pub fn construct_flat(spec: &AreaSpec, tol_eq: f64) -> Result<FlatPolyhedron> {
    let class = classify(spec, tol_eq)?;
    if !matches!(class.tag, Tag::Flat | Tag::TwoFaceFlat) {
        return Err(Error::NotFlat { slack: class.slack });
    }
    let top = spec.largest();
    let side = top.sqrt();
    let strip_widths = spec.areas[1..].iter().map(|a| a / side).collect();
    Ok(FlatPolyhedron {
        side,
        strip_widths,
        top_face_area: top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> AreaSpec {
        make_area_spec(v).unwrap()
    }

    #[test]
    fn sorts_and_records_permutation() {
        let s = spec(&[1.0, 100.0, 1.0, 1.0]);
        assert_eq!(s.areas(), &[100.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.permutation(), &[1, 0, 2, 3]);
        assert_eq!(s.original_order(), vec![1.0, 100.0, 1.0, 1.0]);
    }

    #[test]
    fn single_area_passes_validation() {
        assert_eq!(spec(&[5.0]).n(), 1);
    }

    #[test]
    fn rejects_bad_entries() {
        assert_eq!(
            make_area_spec(&[2.0, -1.0]),
            Err(Error::NonPositiveArea { index: 1, value: -1.0 })
        );
        assert!(matches!(make_area_spec(&[0.0, 1.0]), Err(Error::NonPositiveArea { index: 0, .. })));
        assert_eq!(make_area_spec(&[1.0, f64::NAN]), Err(Error::NonFiniteArea { index: 1 }));
        assert_eq!(make_area_spec(&[f64::INFINITY]), Err(Error::NonFiniteArea { index: 0 }));
        assert_eq!(make_area_spec(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn classification_examples() {
        let c = classify(&spec(&[100.0, 1.0, 1.0, 1.0]), DEFAULT_TOL_EQ).unwrap();
        assert_eq!(c.tag, Tag::Infeasible);
        assert_eq!(c.slack, -97.0);

        let c = classify(&spec(&[6.0, 3.0, 2.0, 1.0]), DEFAULT_TOL_EQ).unwrap();
        assert_eq!(c.tag, Tag::Flat);
        assert_eq!(c.slack, 0.0);

        let c = classify(&spec(&[9.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0]), DEFAULT_TOL_EQ).unwrap();
        assert_eq!(c.tag, Tag::Solid);
        assert_eq!(c.slack, 13.0);
    }

    #[test]
    fn small_counts() {
        assert_eq!(
            classify(&spec(&[5.0]), DEFAULT_TOL_EQ),
            Err(Error::UnsupportedCount { n: 1 })
        );
        assert_eq!(classify(&spec(&[2.0, 2.0]), DEFAULT_TOL_EQ).unwrap().tag, Tag::TwoFaceFlat);
        assert_eq!(classify(&spec(&[2.0, 1.0]), DEFAULT_TOL_EQ).unwrap().tag, Tag::Infeasible);
        assert_eq!(classify(&spec(&[3.0, 4.0, 5.0]), DEFAULT_TOL_EQ).unwrap().tag, Tag::TriangleOnly);
        assert_eq!(classify(&spec(&[4.0, 2.0, 2.0]), DEFAULT_TOL_EQ).unwrap().tag, Tag::Flat);
        assert_eq!(classify(&spec(&[5.0, 2.0, 2.0]), DEFAULT_TOL_EQ).unwrap().tag, Tag::Infeasible);
    }

    #[test]
    fn tolerance_is_relative() {
        let s = spec(&[1.0 + 1e-14, 0.5, 0.5]);
        assert_eq!(classify(&s, DEFAULT_TOL_EQ).unwrap().tag, Tag::Flat);
        assert_eq!(classify(&s, 0.0).unwrap().tag, Tag::Infeasible);
        let big = s.scaled(1e9);
        assert_eq!(classify(&big, DEFAULT_TOL_EQ).unwrap().tag, Tag::Flat);
    }

    #[test]
    fn flat_square_and_strips() {
        let f = construct_flat(&spec(&[6.0, 3.0, 2.0, 1.0]), DEFAULT_TOL_EQ).unwrap();
        let r6 = 6f64.sqrt();
        assert_eq!(f.side, r6);
        assert_eq!(f.strip_widths, vec![3.0 / r6, 2.0 / r6, 1.0 / r6]);
        let sum: f64 = f.strip_widths.iter().sum();
        assert!((sum - f.side).abs() <= 1e-12 * f.side);

        let f = construct_flat(&spec(&[4.0, 2.0, 2.0]), DEFAULT_TOL_EQ).unwrap();
        assert_eq!(f.side, 2.0);
        assert_eq!(f.strip_widths, vec![1.0, 1.0]);
        assert_eq!(f.face_areas(), vec![4.0, 2.0, 2.0]);
    }

    #[test]
    fn flat_rejects_strict_inequality() {
        let s = spec(&[9.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0]);
        assert_eq!(construct_flat(&s, DEFAULT_TOL_EQ), Err(Error::NotFlat { slack: 13.0 }));
    }
}
