//! The 27 lines, as pairs of linear forms in `(x, y, z, t)` over the tower.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::SurfaceSpec;
use crate::error::{invalid, Error, Result};
use crate::numeric::{MultiQuadElem, MultiQuadTower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineLabel {
    /// `L1, L2, L3`: the lines at infinity `x = t = 0` etc.
    Infinity(u8),
    /// `ℓ_i(ε, δ)` with `i` in `1..=6`.
    Affine { index: u8, eps: i8, delta: i8 },
}

/// Per-line data: radicand indices `(i, j)`, the coordinate set to a multiple
/// of `t`, the coordinate solved for, the free coordinate, and which
/// coefficients play the role of `(P, Q)` in the constant term.
struct Shape {
    i: usize,
    j: usize,
    fixed: usize,
    solved: usize,
    free: usize,
    pq: (usize, usize),
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const T: usize = 3;

fn shape(index: u8) -> Shape {
    let (i, j, fixed, solved, free, pq) = match index {
        1 => (0, 1, X, Y, Z, (2, 1)),
        2 => (0, 3, Y, Z, X, (0, 2)),
        3 => (0, 2, Z, Y, X, (0, 1)),
        4 => (2, 3, X, Y, Z, (2, 1)),
        5 => (1, 2, Y, Z, X, (0, 2)),
        6 => (1, 3, Z, Y, X, (0, 1)),
        _ => unreachable!("line index out of range"),
    };
    Shape {
        i,
        j,
        fixed,
        solved,
        free,
        pq,
    }
}

impl LineLabel {
    pub fn all() -> Vec<LineLabel> {
        let mut v: Vec<LineLabel> = (1..=3).map(LineLabel::Infinity).collect();
        for index in 1..=6 {
            for eps in [1, -1] {
                for delta in [1, -1] {
                    v.push(LineLabel::Affine { index, eps, delta });
                }
            }
        }
        v
    }

    pub fn ell(index: u8, eps: i8, delta: i8) -> Self {
        LineLabel::Affine { index, eps, delta }
    }

    /// Label of the image under `σ_s` (which negates `√(k_s² - 4)`, `s` in `1..=4`).
    pub fn conjugate(&self, s: usize) -> LineLabel {
        match *self {
            LineLabel::Infinity(n) => LineLabel::Infinity(n),
            LineLabel::Affine { index, eps, delta } => {
                let sh = shape(index);
                LineLabel::Affine {
                    index,
                    eps: if sh.i + 1 == s { -eps } else { eps },
                    delta: if sh.j + 1 == s { -delta } else { delta },
                }
            }
        }
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineLabel::Infinity(n) => write!(f, "L{n}"),
            LineLabel::Affine { index, eps, delta } => write!(f, "l{index}({eps},{delta})"),
        }
    }
}

impl std::str::FromStr for LineLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad line label {s:?}"));
        if let Some(n) = s.strip_prefix('L') {
            let n: u8 = n.parse().map_err(|_| bad())?;
            if (1..=3).contains(&n) {
                return Ok(LineLabel::Infinity(n));
            }
            return Err(bad());
        }
        let rest = s.strip_prefix('l').or_else(|| s.strip_prefix("ℓ")).ok_or_else(bad)?;
        let (idx, signs) = rest.split_once('(').ok_or_else(bad)?;
        let signs = signs.strip_suffix(')').ok_or_else(bad)?;
        let (e, d) = signs.split_once(',').ok_or_else(bad)?;
        let index: u8 = idx.parse().map_err(|_| bad())?;
        let eps: i8 = e.trim().parse().map_err(|_| bad())?;
        let delta: i8 = d.trim().parse().map_err(|_| bad())?;
        if !(1..=6).contains(&index) || eps.abs() != 1 || delta.abs() != 1 {
            return Err(bad());
        }
        Ok(LineLabel::Affine { index, eps, delta })
    }
}

impl Serialize for LineLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A line given by two linear forms, each a coefficient vector on `(x, y, z, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineOnX {
    pub label: LineLabel,
    pub forms: [[MultiQuadElem; 4]; 2],
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Builds one of the 27 lines over the tower of `spec`.
pub fn line(spec: &SurfaceSpec, tower: &Arc<MultiQuadTower>, label: LineLabel) -> Result<LineOnX> {
    let zero = || MultiQuadElem::zero(tower);
    let one = MultiQuadElem::from_int(tower, 1);
    match label {
        LineLabel::Infinity(n) => {
            let mut f1: [MultiQuadElem; 4] = std::array::from_fn(|_| zero());
            let mut f2: [MultiQuadElem; 4] = std::array::from_fn(|_| zero());
            f1[n as usize - 1] = one.clone();
            f2[T] = one;
            Ok(LineOnX {
                label,
                forms: [f1, f2],
            })
        }
        LineLabel::Affine { index, eps, delta } => {
            let sh = shape(index);
            let k = spec.k.0;
            let kk = |m: usize| MultiQuadElem::from_int(tower, k[m]);
            let root = |m: usize, sign: i8| {
                MultiQuadElem::sqrt_radicand(tower, m).scale(&rat(BigInt::from(sign)))
            };
            let half = BigRational::new(1.into(), 2.into());
            let quarter = BigRational::new(1.into(), 4.into());
            // fixed = A t
            let a_coef = (&(&kk(sh.i) * &kk(sh.j)) + &(&root(sh.i, eps) * &root(sh.j, delta))).scale(&half);
            // solved = -B free - C t
            let b_coef = (&(&kk(sh.i) + &root(sh.i, eps)) * &(&kk(sh.j) + &root(sh.j, delta))).scale(&quarter);
            let den = (&(&kk(sh.i) * &root(sh.j, delta)) + &(&kk(sh.j) * &root(sh.i, eps))).scale(&half);
            let lin = spec.linear();
            let p = MultiQuadElem::from_int(tower, lin[sh.pq.0].clone());
            let q = MultiQuadElem::from_int(tower, lin[sh.pq.1].clone());
            let c_coef = (&p - &(&q * &b_coef)).try_div(&den)?;
            let mut f1: [MultiQuadElem; 4] = std::array::from_fn(|_| zero());
            f1[sh.fixed] = one.clone();
            f1[T] = -&a_coef;
            let mut f2: [MultiQuadElem; 4] = std::array::from_fn(|_| zero());
            f2[sh.solved] = one;
            f2[sh.free] = b_coef;
            f2[T] = c_coef;
            Ok(LineOnX {
                label,
                forms: [f1, f2],
            })
        }
    }
}

/// All 27 lines, in the order `L1..L3`, then `ℓ_i(ε,δ)` by index with
/// `(ε,δ)` in `(1,1), (1,-1), (-1,1), (-1,-1)`.
///
/// Each line is checked against the cubic before being returned.
pub fn lines_of_x(spec: &SurfaceSpec) -> Result<Vec<LineOnX>> {
    spec.require_smooth()?;
    if spec.field_degree != 16 {
        return Err(Error::UnsupportedInput(format!(
            "lines are produced only for towers of degree 16 (got {})",
            spec.field_degree
        )));
    }
    let tower = spec.tower()?;
    let mut out = Vec::with_capacity(27);
    for label in LineLabel::all() {
        let l = line(spec, &tower, label)?;
        if !verify_on_surface(spec, &l)? {
            return Err(Error::Arithmetic(format!("line {label} does not lie on the surface")));
        }
        out.push(l);
    }
    Ok(out)
}

/// Projective cubic `t(x²+y²+z²) + xyz - t²(ax+by+cz) - dt³`.
fn cubic(spec: &SurfaceSpec, p: &[MultiQuadElem; 4]) -> MultiQuadElem {
    let [x, y, z, t] = p;
    let tower = &x.tower;
    let c = |n: &BigInt| MultiQuadElem::from_int(tower, n.clone());
    let sq = &(&(x * x) + &(y * y)) + &(z * z);
    let lin = &(&(&c(&spec.a) * x) + &(&c(&spec.b) * y)) + &(&c(&spec.c) * z);
    let t2 = t * t;
    let mut r = &(t * &sq) + &(&(x * y) * z);
    r = &r - &(&t2 * &lin);
    &r - &(&(&c(&spec.d) * &t2) * t)
}

/// Two points spanning the line: kernel of the 2×4 system of its forms.
fn spanning_points(l: &LineOnX) -> Result<[[MultiQuadElem; 4]; 2]> {
    let [f1, f2] = &l.forms;
    for u in 0..4 {
        for v in u + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|w| *w != u && *w != v).collect();
            let (r0, r1) = (rest[0], rest[1]);
            let det = &(&f1[r0] * &f2[r1]) - &(&f1[r1] * &f2[r0]);
            if det.is_zero() {
                continue;
            }
            let mut pts = Vec::new();
            for (su, sv) in [(1i64, 0i64), (0, 1)] {
                let s_u = MultiQuadElem::from_int(&det.tower, su);
                let s_v = MultiQuadElem::from_int(&det.tower, sv);
                let rhs0 = -&(&(&f1[u] * &s_u) + &(&f1[v] * &s_v));
                let rhs1 = -&(&(&f2[u] * &s_u) + &(&f2[v] * &s_v));
                let p0 = (&(&rhs0 * &f2[r1]) - &(&f1[r1] * &rhs1)).try_div(&det)?;
                let p1 = (&(&f1[r0] * &rhs1) - &(&f2[r0] * &rhs0)).try_div(&det)?;
                let mut pt: [MultiQuadElem; 4] = std::array::from_fn(|_| MultiQuadElem::zero(&det.tower));
                pt[u] = s_u;
                pt[v] = s_v;
                pt[r0] = p0;
                pt[r1] = p1;
                pts.push(pt);
            }
            let p2 = pts.pop().unwrap();
            let p1 = pts.pop().unwrap();
            return Ok([p1, p2]);
        }
    }
    invalid(format!("forms of {} are dependent", l.label))
}

/// True when the cubic vanishes identically on the line: the restriction is a
/// binary cubic, so vanishing at four distinct points of P¹ suffices.
pub fn verify_on_surface(spec: &SurfaceSpec, l: &LineOnX) -> Result<bool> {
    let [p, q] = spanning_points(l)?;
    let combos: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
    for (s, t) in combos {
        let pt: [MultiQuadElem; 4] = std::array::from_fn(|i| {
            &p[i].scale(&rat(BigInt::from(s))) + &q[i].scale(&rat(BigInt::from(t)))
        });
        if !cubic(spec, &pt).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn det4(m: [&[MultiQuadElem; 4]; 4]) -> MultiQuadElem {
    // cofactor expansion along the first row with 2x2 minors of the bottom rows
    let tower = &m[0][0].tower;
    let minor2 = |c0: usize, c1: usize| &(&m[2][c0] * &m[3][c1]) - &(&m[2][c1] * &m[3][c0]);
    let minor3 = |cols: [usize; 3]| {
        let mut acc = MultiQuadElem::zero(tower);
        for (pos, &c) in cols.iter().enumerate() {
            let others: Vec<usize> = cols.iter().copied().filter(|x| *x != c).collect();
            let term = &m[1][c] * &minor2(others[0], others[1]);
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    };
    let mut total = MultiQuadElem::zero(tower);
    for c in 0..4 {
        if m[0][c].is_zero() {
            continue;
        }
        let cols: Vec<usize> = (0..4).filter(|x| *x != c).collect();
        let term = &m[0][c] * &minor3([cols[0], cols[1], cols[2]]);
        total = if c % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

fn same_line(l1: &LineOnX, l2: &LineOnX) -> Result<bool> {
    let pts = spanning_points(l2)?;
    for f in &l1.forms {
        for p in &pts {
            let mut acc = MultiQuadElem::zero(&p[0].tower);
            for i in 0..4 {
                acc = &acc + &(&f[i] * &p[i]);
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl LineOnX {
    /// Image under `σ_s`: negate every coordinate involving `√(k_s² - 4)`.
    pub fn conjugate(&self, s: usize) -> LineOnX {
        let bit = 1usize << (s - 1);
        let conj = |e: &MultiQuadElem| {
            let mut out = e.clone();
            for m in 0..16 {
                if m & bit != 0 {
                    out.coords[m] = -&out.coords[m];
                }
            }
            out
        };
        LineOnX {
            label: self.label.conjugate(s),
            forms: [
                std::array::from_fn(|i| conj(&self.forms[0][i])),
                std::array::from_fn(|i| conj(&self.forms[1][i])),
            ],
        }
    }

    /// Whether both lines describe the same subset of P³.
    pub fn same_as(&self, other: &LineOnX) -> Result<bool> {
        same_line(self, other)
    }
}

/// 1 when the lines meet, 0 when skew. The four forms have a common nonzero
/// solution exactly when their 4×4 determinant vanishes.
pub fn intersection_number(l1: &LineOnX, l2: &LineOnX) -> Result<u8> {
    if l1.label == l2.label || same_line(l1, l2)? {
        return invalid(format!("intersection of {} with itself", l1.label));
    }
    let d = det4([&l1.forms[0], &l1.forms[1], &l2.forms[0], &l2.forms[1]]);
    Ok(if d.is_zero() { 1 } else { 0 })
}

/// Symmetric incidence matrix with zero diagonal.
pub fn incidence_matrix(lines: &[LineOnX]) -> Result<Vec<Vec<u8>>> {
    let n = lines.len();
    let mut m = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = intersection_number(&lines[i], &lines[j])?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::ParamVector;
    use num_traits::Zero;

    fn spec() -> SurfaceSpec {
        SurfaceSpec::new(ParamVector::new(127, 5, 725, 1445)).unwrap()
    }

    fn lab(s: &str) -> LineLabel {
        s.parse().unwrap()
    }

    /// Independent oracle: substitute the explicit parametrisation
    /// `fixed = A t, solved = -B s - C t, free = s` into the affine-homogeneous
    /// cubic and expand as a polynomial in `(s, t)`; every coefficient must vanish.
    fn expand_in_s_t(spec: &SurfaceSpec, l: &LineOnX) -> bool {
        let LineLabel::Affine { index, .. } = l.label else {
            return true;
        };
        let sh = shape(index);
        let tower = &l.forms[0][0].tower;
        let zero = MultiQuadElem::zero(tower);
        let one = MultiQuadElem::from_int(tower, 1);
        let a_coef = -&l.forms[0][T];
        let b_coef = l.forms[1][sh.free].clone();
        let c_coef = l.forms[1][T].clone();
        // each coordinate as a linear polynomial [coef of s, coef of t]
        let mut lin: [[MultiQuadElem; 2]; 4] = std::array::from_fn(|_| [zero.clone(), zero.clone()]);
        lin[sh.fixed] = [zero.clone(), a_coef];
        lin[sh.solved] = [-&b_coef, -&c_coef];
        lin[sh.free] = [one.clone(), zero.clone()];
        lin[T] = [zero.clone(), one];
        // polynomials in (s,t) as maps from the s-degree to a coefficient (total degree 3)
        type Poly = Vec<MultiQuadElem>;
        let as_poly = |v: &[MultiQuadElem; 2]| -> Poly {
            // degree-1 homogeneous: index = power of s
            vec![v[1].clone(), v[0].clone()]
        };
        let mul = |p: &Poly, q: &Poly| -> Poly {
            let mut out = vec![zero.clone(); p.len() + q.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
            out
        };
        let add = |p: &Poly, q: &Poly| -> Poly {
            p.iter().zip(q).map(|(a, b)| a + b).collect()
        };
        let scale = |p: &Poly, c: &BigInt| -> Poly {
            let c = MultiQuadElem::from_int(tower, c.clone());
            p.iter().map(|a| a * &c).collect()
        };
        let [x, y, z, t] = [0, 1, 2, 3].map(|i| as_poly(&lin[i]));
        let sq = add(&add(&mul(&x, &x), &mul(&y, &y)), &mul(&z, &z));
        let mut total = add(&mul(&t, &sq), &mul(&mul(&x, &y), &z));
        let linpart = add(&add(&scale(&x, &spec.a), &scale(&y, &spec.b)), &scale(&z, &spec.c));
        let neg = |p: &Poly| -> Poly { p.iter().map(|a| -a).collect() };
        total = add(&total, &neg(&mul(&mul(&t, &t), &linpart)));
        total = add(&total, &neg(&scale(&mul(&mul(&t, &t), &t), &spec.d)));
        total.iter().all(MultiQuadElem::is_zero)
    }

    #[test]
    fn labels_round_trip() {
        let all = LineLabel::all();
        assert_eq!(all.len(), 27);
        for l in all {
            assert_eq!(l.to_string().parse::<LineLabel>().unwrap(), l);
        }
    }

    #[test]
    fn every_line_expands_to_zero() {
        let s = spec();
        let lines = lines_of_x(&s).unwrap();
        assert_eq!(lines.len(), 27);
        for l in &lines {
            assert!(expand_in_s_t(&s, l), "{}", l.label);
        }
    }

    #[test]
    fn perturbed_line_is_rejected() {
        let s = spec();
        let tower = s.tower().unwrap();
        let mut l = line(&s, &tower, lab("l1(1,1)")).unwrap();
        l.forms[1][T] = &l.forms[1][T] + &MultiQuadElem::from_int(&tower, 1);
        assert!(!verify_on_surface(&s, &l).unwrap());
        assert!(!expand_in_s_t(&s, &l));
    }

    #[test]
    fn small_incidences() {
        let s = spec();
        let t = s.tower().unwrap();
        let g = |x: &str| line(&s, &t, lab(x)).unwrap();
        assert_eq!(intersection_number(&g("l1(1,1)"), &g("l4(1,1)")).unwrap(), 0);
        assert_eq!(intersection_number(&g("l1(-1,1)"), &g("l1(1,-1)")).unwrap(), 1);
        assert_eq!(intersection_number(&g("L1"), &g("L2")).unwrap(), 1);
        assert!(intersection_number(&g("L1"), &g("L1")).is_err());
    }

    #[test]
    fn conjugation_matches_labels() {
        let s = spec();
        let t = s.tower().unwrap();
        for label in LineLabel::all() {
            let l = line(&s, &t, label).unwrap();
            for sigma in 1..=4 {
                let c = l.conjugate(sigma);
                let named = line(&s, &t, c.label).unwrap();
                assert!(c.same_as(&named).unwrap(), "{label} under σ{sigma}");
            }
        }
    }

    #[test]
    fn cubic_restricted_to_l1_vanishes() {
        let s = spec();
        let t = s.tower().unwrap();
        let l = line(&s, &t, LineLabel::Infinity(1)).unwrap();
        let [p, q] = spanning_points(&l).unwrap();
        assert!(p[0].is_zero() && p[3].is_zero() && q[0].is_zero() && q[3].is_zero());
        assert!(cubic(&s, &p).is_zero());
        assert!(BigInt::zero().is_zero());
    }
}
