use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::upoly;
use crate::error::{Error, Result};
use crate::ff::{build_field, render_coeffs, Field, FieldElement, FiniteField, GaloisField, ZechField};
use crate::mpoly::{extend_scalars, groebner_basis, MultiPoly};

/// A closed point of `P^{n-1}` over the base field, represented by one of
/// its geometric points. `e` is the degree of its field of definition, and
/// `coords` live in `F_{q^e}` with the first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub e: usize,
    pub coords: Vec<FieldElement>,
}

impl ProjectivePoint {
    /// The field `F_{q^e}` holding the coordinates.
    pub fn field(&self, base: &GaloisField) -> Result<GaloisField> {
        build_field(base.prime(), base.degree() * self.e)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| render_coeffs(&c.coeffs)).collect();
        write!(f, "({})", parts.join(":"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Largest extension degree searched.
    pub e_max: usize,
    /// More geometric points than this at one level counts as non-isolated.
    pub point_cap: usize,
    /// Largest number of univariate gcd problems allowed per level.
    pub work_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { e_max: 6, point_cap: 4096, work_limit: 1 << 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularSearch {
    pub n: usize,
    /// Closed singular points sorted by degree, then coordinates.
    pub points: Vec<ProjectivePoint>,
    pub e_max: usize,
    /// Largest level actually searched (all levels up to it were searched).
    pub e_searched: usize,
    /// `rational_counts[e-1]` = number of singular points over `F_{q^e}`.
    pub rational_counts: Vec<u64>,
    /// Set when a level exhibited a positive-dimensional singular set.
    pub non_isolated_evidence: Option<String>,
}

impl SingularSearch {
    /// Number of geometric points.
    pub fn geometric_count(&self) -> u64 {
        self.points.iter().map(|p| p.e as u64).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isolation {
    /// Every chart of the singular scheme is zero-dimensional.
    Certified,
    /// Point counts stabilized between two levels.
    Heuristic,
    NonIsolated,
    /// Not enough levels could be searched to decide.
    Undecided,
}

enum Level<E> {
    Points(Vec<Vec<E>>),
    Line,
    TooMany,
}

/// Singular points of the hypersurface `{form = 0}` in `P^{n-1}` over
/// `F_{q^e}` for `e ≤ e_max`. Requires `gcd(p, deg form) = 1`, so that the
/// common zeros of the partials are exactly the singular points.
pub fn singular_points(form: &MultiPoly<GaloisField>, base: &GaloisField, opts: &SearchOptions) -> Result<SingularSearch> {
    let n = form.nvars();
    let d = form.degree().ok_or_else(|| Error::InvalidArgument("zero form".into()))?;
    if !form.is_homogeneous() {
        return Err(Error::InvalidArgument("form is not homogeneous".into()));
    }
    if (d as u64).gcd(&base.prime()) != 1 {
        return Err(Error::CharacteristicDividesDegree { p: base.prime(), d });
    }
    let partials = form.gradient();
    let mut search = SingularSearch {
        n,
        points: Vec::new(),
        e_max: opts.e_max,
        e_searched: 0,
        rational_counts: Vec::new(),
        non_isolated_evidence: None,
    };
    let mut closed: BTreeSet<ProjectivePoint> = BTreeSet::new();
    for e in 1..=opts.e_max {
        let Some(level) = search_extension(&partials, base, e, opts)? else {
            break;
        };
        match level {
            LevelOutcome::Line => {
                search.non_isolated_evidence = Some(format!("a line of singular points over F_(q^{e})"));
                search.e_searched = e;
                break;
            }
            LevelOutcome::TooMany => {
                search.non_isolated_evidence =
                    Some(format!("more than {} singular points over F_(q^{e})", opts.point_cap));
                search.e_searched = e;
                break;
            }
            LevelOutcome::Points(count, new_points) => {
                search.rational_counts.push(count);
                closed.extend(new_points);
                search.e_searched = e;
            }
        }
    }
    search.points = closed.into_iter().collect();
    Ok(search)
}

enum LevelOutcome {
    Points(u64, Vec<ProjectivePoint>),
    Line,
    TooMany,
}

/// Level `e`, or `None` when it is out of reach.
fn search_extension(
    partials: &[MultiPoly<GaloisField>],
    base: &GaloisField,
    e: usize,
    opts: &SearchOptions,
) -> Result<Option<LevelOutcome>> {
    let n = partials.len();
    let ext = match build_field(base.prime(), base.degree() * e) {
        Ok(f) => f,
        Err(Error::FieldTooLarge { .. }) => return Ok(None),
        Err(err) => return Err(err),
    };
    if !ZechField::supports(&ext) {
        return Ok(None);
    }
    let work = (ext.order() as u128).checked_pow(n.saturating_sub(2) as u32).unwrap_or(u128::MAX);
    if work > opts.work_limit as u128 {
        return Ok(None);
    }
    let z = ZechField::new(&ext)?;
    let lifted: Vec<MultiPoly<ZechField>> =
        partials.iter().map(|g| extend_scalars(g, base, &z)).collect::<Result<_>>()?;
    let found = match search_level(&lifted, &z, n, opts.point_cap) {
        Level::Line => return Ok(Some(LevelOutcome::Line)),
        Level::TooMany => return Ok(Some(LevelOutcome::TooMany)),
        Level::Points(pts) => pts,
    };
    let q = base.order();
    let frob = |pt: &Vec<_>| pt.iter().map(|x| z.pow(x, q)).collect::<Vec<_>>();
    let to_galois = |pt: &Vec<_>| pt.iter().map(|x| FieldElement { coeffs: z.to_coeffs(x) }).collect::<Vec<_>>();
    let mut seen = BTreeSet::new();
    let mut points = Vec::new();
    for pt in &found {
        if seen.contains(&to_galois(pt)) {
            continue;
        }
        let mut orbit = vec![pt.clone()];
        let mut cur = frob(pt);
        while cur != *pt {
            orbit.push(cur.clone());
            cur = frob(&cur);
        }
        let reps: Vec<Vec<FieldElement>> = orbit.iter().map(to_galois).collect();
        seen.extend(reps.iter().cloned());
        if orbit.len() == e {
            let coords = reps.into_iter().min().expect("nonempty orbit");
            points.push(ProjectivePoint { e, coords });
        }
    }
    Ok(Some(LevelOutcome::Points(found.len() as u64, points)))
}

/// Coefficients in the last variable after fixing the others to `pt`.
fn univariate_last<T: FiniteField>(g: &MultiPoly<T>, field: &T, pt: &[T::Elem]) -> Vec<T::Elem> {
    let n = g.nvars();
    let mut out: Vec<T::Elem> = Vec::new();
    for (m, c) in g.terms() {
        let e = m.exponents();
        let k = e[n - 1] as usize;
        if out.len() <= k {
            out.resize(k + 1, field.zero());
        }
        let mut t = c.clone();
        for (x, &ex) in pt[..n - 1].iter().zip(&e[..n - 1]) {
            if ex > 0 {
                t = field.mul(&t, &field.pow(x, ex as u64));
            }
        }
        out[k] = field.add(&out[k], &t);
    }
    upoly::trim(field, out)
}

/// Common zeros of `partials` in `P^{n-1}(field)`, canonically scaled.
/// Points are fibered over all coordinates but the last; in each fiber the
/// zeros are the roots of a univariate gcd.
fn search_level<T: FiniteField>(partials: &[MultiPoly<T>], field: &T, n: usize, cap: usize) -> Level<T::Elem> {
    let q = field.order();
    let mut found = Vec::new();
    for lead in 0..n {
        let mut pt = vec![field.zero(); n];
        pt[lead] = field.one();
        let free = n - lead - 1;
        if free == 0 {
            if partials.iter().all(|g| g.evaluate(&pt).map(|v| field.is_zero(&v)).unwrap_or(false)) {
                found.push(pt);
            }
            continue;
        }
        let prefixes = q.pow(free as u32 - 1);
        for idx in 0..prefixes {
            let mut rest = idx;
            for x in pt[lead + 1..n - 1].iter_mut() {
                *x = field.element_at(rest % q);
                rest /= q;
            }
            let mut g: Vec<T::Elem> = Vec::new();
            for part in partials {
                g = upoly::gcd(field, g, univariate_last(part, field, &pt));
                if g.len() == 1 {
                    break;
                }
            }
            if g.is_empty() {
                return Level::Line;
            }
            if g.len() == 1 {
                continue;
            }
            for j in 0..q {
                let y = field.element_at(j);
                if field.is_zero(&upoly::eval(field, &g, &y)) {
                    let mut p = pt.clone();
                    p[n - 1] = y;
                    found.push(p);
                    if found.len() > cap {
                        return Level::TooMany;
                    }
                }
            }
        }
    }
    Level::Points(found)
}

/// Whether the singular points of `{form = 0}` are isolated. For `n ≤ 3`
/// each affine chart of the scheme cut out by the partials is checked for
/// zero-dimensionality with a Gröbner basis; otherwise the point counts over
/// `F_{q^e}` and `F_{q^{2e}}` are compared for the largest searched pair.
pub fn is_isolated(form: &MultiPoly<GaloisField>, base: &GaloisField, search: &SingularSearch) -> Result<Isolation> {
    if search.non_isolated_evidence.is_some() {
        return Ok(Isolation::NonIsolated);
    }
    let n = form.nvars();
    if n <= 3 {
        return Ok(if charts_zero_dimensional(form, base)? { Isolation::Certified } else { Isolation::NonIsolated });
    }
    let counts = &search.rational_counts;
    let e = counts.len() / 2;
    if e == 0 {
        return Ok(Isolation::Undecided);
    }
    Ok(if counts[e - 1] == counts[2 * e - 1] { Isolation::Heuristic } else { Isolation::Undecided })
}

fn charts_zero_dimensional(form: &MultiPoly<GaloisField>, base: &GaloisField) -> Result<bool> {
    let n = form.nvars();
    if n <= 1 {
        return Ok(true);
    }
    let partials = form.gradient();
    for i in 0..n {
        let mut point = vec![base.zero(); n];
        point[i] = base.one();
        let chart: Vec<MultiPoly<GaloisField>> =
            partials.iter().map(|g| g.dehomogenize_translate(&point)).collect::<Result<_>>()?;
        let gb = groebner_basis(&chart)?;
        if !gb.is_unit_ideal() && !gb.is_zero_dimensional() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse;

    fn run(p: u64, n: usize, text: &str) -> (SingularSearch, Isolation) {
        let k = build_field(p, 1).unwrap();
        let f = parse(text, n, &k).unwrap();
        let opts = SearchOptions { e_max: 3, ..Default::default() };
        let s = singular_points(&f, &k, &opts).unwrap();
        let iso = is_isolated(&f, &k, &s).unwrap();
        (s, iso)
    }

    fn coords(pt: &ProjectivePoint) -> Vec<u64> {
        pt.coords.iter().map(|c| c.coeffs[0]).collect()
    }

    #[test]
    fn smooth_binary_cubic() {
        let (s, iso) = run(7, 2, "x1^3 + x2^3");
        assert!(s.points.is_empty());
        assert_eq!(iso, Isolation::Certified);
    }

    #[test]
    fn double_root() {
        let (s, iso) = run(5, 2, "x1^2*x2");
        assert_eq!(s.points.len(), 1);
        assert_eq!(coords(&s.points[0]), vec![0, 1]);
        assert_eq!(iso, Isolation::Certified);
        assert_eq!(s.points[0].to_string(), "(0:1)");
    }

    #[test]
    fn triangle() {
        let (s, iso) = run(7, 3, "x1*x2*x3");
        let pts: Vec<Vec<u64>> = s.points.iter().map(coords).collect();
        assert_eq!(pts, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(iso, Isolation::Certified);
        assert_eq!(s.rational_counts, vec![3, 3, 3]);
    }

    #[test]
    fn singular_line() {
        let (s, iso) = run(5, 3, "x1^2*x3");
        assert!(s.non_isolated_evidence.is_some());
        assert_eq!(iso, Isolation::NonIsolated);
    }

    #[test]
    fn conjugate_points_form_one_closed_point() {
        // the double roots (1:±i) of (x^2 + y^2)^2 x over F_7 live in F_49
        let (s, _) = run(7, 2, "(x1^2 + x2^2)^2*x1");
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].e, 2);
        assert_eq!(s.geometric_count(), 2);
        assert_eq!(s.rational_counts, vec![0, 2, 0]);
        let k49 = s.points[0].field(&build_field(7, 1).unwrap()).unwrap();
        let y = &s.points[0].coords[1];
        assert_eq!(k49.mul(y, y), k49.from_int(-1));
    }

    #[test]
    fn characteristic_dividing_degree_rejected() {
        let k = build_field(3, 1).unwrap();
        let f = parse("x1^3 + x2^3", 2, &k).unwrap();
        assert!(matches!(
            singular_points(&f, &k, &SearchOptions::default()),
            Err(Error::CharacteristicDividesDegree { p: 3, d: 3 })
        ));
    }

    #[test]
    fn nodal_cubic() {
        let (s, iso) = run(5, 3, "x2^2*x3 - x1^3 - x1^2*x3");
        assert_eq!(s.points.len(), 1);
        assert_eq!(coords(&s.points[0]), vec![0, 0, 1]);
        assert_eq!(iso, Isolation::Certified);
    }
}
