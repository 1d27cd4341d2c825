//! Galois lattices `Pic X̄` (rank 7) and `Pic Ū` (rank 4) and their cohomology.
//!
//! Basis of `Pic X̄`: `ℓ, ℓ1..ℓ6`, where `ℓ1..ℓ6` are the six skew lines
//! `ℓ1(1,1), ℓ1(1,-1), ℓ3(-1,1), ℓ4(-1,-1), ℓ4(-1,1), L2` and `ℓ` is the pull-back
//! of a line of P². `σ1` acts on `ℓ, ℓ1, ℓ2, ℓ3` as a Cremona involution and
//! fixes `ℓ4, ℓ5, ℓ6`; `σ3` does the same on `ℓ, ℓ3, ℓ4, ℓ5` and fixes
//! `ℓ1, ℓ2, ℓ6`. Those fixed vectors are an assumption, forced by the
//! kernels of `1 + σ1` and `1 + σ3`, and re-checked against the actual lines
//! by [`cross_check_with_lines`].

pub mod linalg;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{intersection_number, line, LineLabel, SurfaceSpec};
use linalg::Mat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisLatticeModule {
    pub rank: usize,
    pub basis_labels: Vec<String>,
    /// Actions of `σ1..σ4`; column `j` is the image of basis vector `j`.
    pub generators: Vec<Vec<Vec<i64>>>,
    /// Intersection form, when the lattice carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    /// Each factor divides the next; empty for the trivial group. A factor
    /// of 0 stands for a free summand (never produced for finite groups).
    pub invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn order(&self) -> Option<u64> {
        self.invariant_factors
            .iter()
            .try_fold(1u64, |acc, &f| if f == 0 { None } else { acc.checked_mul(f) })
    }
}

impl std::fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|n| if *n == 0 { "Z".to_string() } else { format!("Z/{n}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| i64::from(i == j)).collect()
}

/// Matrix with the given column images.
fn from_images(images: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let n = images.len();
    (0..n).map(|i| (0..n).map(|j| images[j][i]).collect()).collect()
}

/// `v = c0 ℓ + Σ ci ℓi` from a sparse description.
fn vec7(terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; 7];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

fn cremona(t: [usize; 3]) -> Vec<Vec<i64>> {
    let mut images: Vec<Vec<i64>> = (0..7).map(|i| unit(7, i)).collect();
    let [i, j, k] = t;
    images[0] = vec7(&[(0, 2), (i, -1), (j, -1), (k, -1)]);
    images[i] = vec7(&[(0, 1), (j, -1), (k, -1)]);
    images[j] = vec7(&[(0, 1), (i, -1), (k, -1)]);
    images[k] = vec7(&[(0, 1), (i, -1), (j, -1)]);
    from_images(images)
}

fn swap(n: usize, i: usize, j: usize) -> Vec<Vec<i64>> {
    let mut images: Vec<Vec<i64>> = (0..n).map(|c| unit(n, c)).collect();
    images.swap(i, j);
    from_images(images)
}

pub fn picard_x_module() -> GaloisLatticeModule {
    let mut pairing = vec![vec![0i64; 7]; 7];
    pairing[0][0] = 1;
    for (i, row) in pairing.iter_mut().enumerate().skip(1) {
        row[i] = -1;
    }
    GaloisLatticeModule {
        rank: 7,
        basis_labels: ["l", "l1", "l2", "l3", "l4", "l5", "l6"].map(String::from).to_vec(),
        generators: vec![cremona([1, 2, 3]), swap(7, 1, 2), cremona([3, 4, 5]), swap(7, 4, 5)],
        pairing: Some(pairing),
    }
}

/// Quotient map `Pic X̄ → Pic Ū` (4×7): the boundary lines `L1 = 2ℓ - Σ_{i≠3} ℓi`,
/// `L2 = ℓ6`, `L3 = ℓ - ℓ3 - ℓ6` are killed, leaving `[ℓ1]..[ℓ4]`.
pub fn quotient_map() -> Vec<Vec<i64>> {
    let images: Vec<Vec<i64>> = vec![
        vec![0, 0, 1, 0],   // ℓ = ℓ3 + ℓ6
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
        vec![-1, -1, 2, -1], // from 2ℓ = ℓ1 + ℓ2 + ℓ4 + ℓ5 + ℓ6
        vec![0, 0, 0, 0],
    ];
    (0..4).map(|i| (0..7).map(|j| images[j][i]).collect()).collect()
}

/// Boundary classes `L1, L2, L3` as vectors in `Pic X̄`.
pub fn boundary_relations() -> Vec<Vec<i64>> {
    vec![
        vec7(&[(0, 2), (1, -1), (2, -1), (4, -1), (5, -1), (6, -1)]),
        vec7(&[(6, 1)]),
        vec7(&[(0, 1), (3, -1), (6, -1)]),
    ]
}

/// Induced action on the quotient, computed as `q σ s` with the section
/// `s: [ℓi] ↦ ℓi`; [`verify_quotient`] checks that this is well defined.
pub fn picard_u_module() -> GaloisLatticeModule {
    let x = picard_x_module();
    let q = linalg::from_i64(&quotient_map());
    let mut section = linalg::zeros(7, 4);
    for i in 0..4 {
        section[i + 1][i] = BigInt::one();
    }
    let generators = x
        .generators
        .iter()
        .map(|g| to_i64(&linalg::mul(&linalg::mul(&q, &linalg::from_i64(g)), &section)))
        .collect();
    GaloisLatticeModule {
        rank: 4,
        basis_labels: ["[l1]", "[l2]", "[l3]", "[l4]"].map(String::from).to_vec(),
        generators,
        pairing: None,
    }
}

/// Checks that the relations map to zero and that `q σ = σ_U q` for each generator.
pub fn verify_quotient(x: &GaloisLatticeModule, u: &GaloisLatticeModule) -> Vec<String> {
    let mut out = Vec::new();
    let q = linalg::from_i64(&quotient_map());
    for (n, rel) in boundary_relations().iter().enumerate() {
        let r: Vec<BigInt> = rel.iter().map(|&v| BigInt::from(v)).collect();
        if !linalg::apply(&q, &r).iter().all(Zero::is_zero) {
            out.push(format!("L{} does not map to zero", n + 1));
        }
    }
    for (i, (gx, gu)) in x.generators.iter().zip(&u.generators).enumerate() {
        let left = linalg::mul(&q, &linalg::from_i64(gx));
        let right = linalg::mul(&linalg::from_i64(gu), &q);
        if left != right {
            out.push(format!("σ{} does not descend to the quotient", i + 1));
        }
    }
    out
}

fn to_i64(m: &Mat) -> Vec<Vec<i64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64().expect("small entry")).collect())
        .collect()
}

impl GaloisLatticeModule {
    pub fn generator(&self, i: usize) -> Mat {
        linalg::from_i64(&self.generators[i - 1])
    }

    /// Restriction of the action to a stable sublattice given by a column basis.
    pub fn restrict(&self, basis: &Mat) -> Result<GaloisLatticeModule> {
        let r = linalg::cols(basis);
        let mut generators = Vec::new();
        for i in 1..=self.generators.len() {
            let img = linalg::mul(&self.generator(i), basis);
            let mut cols = Vec::new();
            for j in 0..r {
                let c = linalg::solve(basis, &linalg::column(&img, j)).ok_or_else(|| {
                    Error::InvalidModule(format!("sublattice is not stable under σ{i}"))
                })?;
                cols.push(c);
            }
            generators.push(to_i64(&linalg::from_columns(&cols, r)));
        }
        Ok(GaloisLatticeModule {
            rank: r,
            basis_labels: (1..=r).map(|j| format!("v{j}")).collect(),
            generators,
            pairing: None,
        })
    }

    fn check_subgroup(&self, subgroup: &[usize]) -> Result<()> {
        if subgroup.is_empty() {
            return Err(Error::InvalidArgument("subgroup must be nonempty".into()));
        }
        let id = linalg::identity(self.rank);
        for &i in subgroup {
            if i == 0 || i > self.generators.len() {
                return Err(Error::InvalidArgument(format!("no generator σ{i}")));
            }
            let g = self.generator(i);
            if linalg::mul(&g, &g) != id {
                return Err(Error::InvalidModule(format!("σ{i} is not an involution")));
            }
            for &j in subgroup {
                let h = self.generator(j);
                if linalg::mul(&g, &h) != linalg::mul(&h, &g) {
                    return Err(Error::InvalidModule(format!("σ{i} and σ{j} do not commute")));
                }
            }
        }
        Ok(())
    }
}

/// Joint fixed lattice of the given generators (1-based), as a column basis.
pub fn fixed_lattice(m: &GaloisLatticeModule, subgroup: &[usize]) -> Mat {
    let n = m.rank;
    let id = linalg::identity(n);
    let mut stacked = Vec::new();
    for &i in subgroup {
        stacked.extend(linalg::sub(&m.generator(i), &id));
    }
    linalg::kernel(&stacked, n)
}

/// Quotient `Z^z / (columns of y)` as invariant factors.
fn quotient_group(y: &Mat, z: usize) -> FiniteAbelianGroup {
    let mut factors = Vec::new();
    let rank = if linalg::cols(y) == 0 || y.is_empty() {
        0
    } else {
        let sm = linalg::smith_normal_form(y);
        for d in sm.diagonal() {
            if !d.is_one() {
                factors.push(d.to_u64().expect("small invariant factor"));
            }
        }
        sm.rank
    };
    factors.extend(std::iter::repeat(0).take(z - rank));
    FiniteAbelianGroup {
        invariant_factors: factors,
    }
}

/// Express each column of `b` in the basis `k` (which must contain it).
fn coordinates(k: &Mat, b: &Mat) -> Mat {
    let z = linalg::cols(k);
    let cols: Vec<Vec<BigInt>> = (0..linalg::cols(b))
        .map(|j| linalg::solve(k, &linalg::column(b, j)).expect("vector lies in the lattice"))
        .collect();
    linalg::from_columns(&cols, z)
}

/// `H¹(⟨σ⟩, M) = Ker(1+σ) / (1-σ)M` for a single involution.
pub fn h1_cyclic(m: &GaloisLatticeModule, sigma: usize) -> Result<FiniteAbelianGroup> {
    m.check_subgroup(&[sigma])?;
    let n = m.rank;
    let id = linalg::identity(n);
    let g = m.generator(sigma);
    let norm_zero = linalg::kernel(&linalg::add(&id, &g), n);
    let z = linalg::cols(&norm_zero);
    if z == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let image = linalg::sub(&id, &g);
    Ok(quotient_group(&coordinates(&norm_zero, &image), z))
}

/// `H¹` of the elementary abelian 2-group generated by `subgroup` (1-based
/// generator indices), from explicit 1-cocycles.
///
/// A cocycle is fixed by its values `c_i` on the generators, subject to
/// `(1+σ_i) c_i = 0` and `(1-σ_j) c_i = (1-σ_i) c_j`; coboundaries are
/// `c_i = (σ_i - 1) m`.
pub fn h1(m: &GaloisLatticeModule, subgroup: &[usize]) -> Result<FiniteAbelianGroup> {
    m.check_subgroup(subgroup)?;
    if subgroup.len() == 1 {
        return h1_cyclic(m, subgroup[0]);
    }
    let n = m.rank;
    let g = subgroup.len();
    let id = linalg::identity(n);
    let sig: Vec<Mat> = subgroup.iter().map(|&i| m.generator(i)).collect();
    let mut rows: Mat = Vec::new();
    for (a, s) in sig.iter().enumerate() {
        let block = linalg::add(&id, s);
        for r in block {
            let mut row = vec![BigInt::zero(); g * n];
            row[a * n..(a + 1) * n].clone_from_slice(&r);
            rows.push(row);
        }
    }
    for a in 0..g {
        for b in a + 1..g {
            let left = linalg::sub(&id, &sig[b]);
            let right = linalg::sub(&id, &sig[a]);
            for r in 0..n {
                let mut row = vec![BigInt::zero(); g * n];
                row[a * n..(a + 1) * n].clone_from_slice(&left[r]);
                for (slot, v) in row[b * n..(b + 1) * n].iter_mut().zip(&right[r]) {
                    *slot = -v;
                }
                rows.push(row);
            }
        }
    }
    let cocycles = linalg::kernel(&rows, g * n);
    let z = linalg::cols(&cocycles);
    if z == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let mut cob = linalg::zeros(g * n, n);
    for (a, s) in sig.iter().enumerate() {
        let d = linalg::sub(s, &id);
        for r in 0..n {
            cob[a * n + r] = d[r].clone();
        }
    }
    Ok(quotient_group(&coordinates(&cocycles, &cob), z))
}

/// The intersection numbers `(σ_i(ℓ_j).ℓ_m)` read off the line
/// configuration, for the rows `σ1(ℓ1..ℓ3)` and `σ3(ℓ3..ℓ5)` against `ℓ1..ℓ6`.
pub const EXPECTED_INTERSECTIONS: [(usize, usize, [i64; 6]); 6] = [
    (1, 1, [0, 1, 1, 0, 0, 0]),
    (1, 2, [1, 0, 1, 0, 0, 0]),
    (1, 3, [1, 1, 0, 0, 0, 0]),
    (3, 3, [0, 0, 0, 1, 1, 0]),
    (3, 4, [0, 0, 1, 0, 1, 0]),
    (3, 5, [0, 0, 1, 1, 0, 0]),
];

/// Labels of the six skew lines forming the blow-down basis.
pub fn blowdown_labels() -> [LineLabel; 6] {
    [
        LineLabel::ell(1, 1, 1),
        LineLabel::ell(1, 1, -1),
        LineLabel::ell(3, -1, 1),
        LineLabel::ell(4, -1, -1),
        LineLabel::ell(4, -1, 1),
        LineLabel::Infinity(2),
    ]
}

fn pair(q: &[Vec<i64>], u: &[i64], v: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..u.len() {
        for j in 0..v.len() {
            s += u[i] * q[i][j] * v[j];
        }
    }
    s
}

fn image_of(m: &GaloisLatticeModule, sigma: usize, j: usize) -> Vec<i64> {
    m.generators[sigma - 1].iter().map(|r| r[j]).collect()
}

/// Involution, commutation and pairing checks; for a rank-7 module with a
/// pairing also the intersection table above.
pub fn verify_action_consistency(m: &GaloisLatticeModule) -> (bool, Vec<String>) {
    let mut v = Vec::new();
    let id = linalg::identity(m.rank);
    for i in 1..=m.generators.len() {
        let g = m.generator(i);
        if linalg::mul(&g, &g) != id {
            v.push(format!("σ{i} is not an involution"));
        }
        for j in i + 1..=m.generators.len() {
            let h = m.generator(j);
            if linalg::mul(&g, &h) != linalg::mul(&h, &g) {
                v.push(format!("σ{i} and σ{j} do not commute"));
            }
        }
        if let Some(q) = &m.pairing {
            let qm = linalg::from_i64(q);
            if linalg::mul(&linalg::mul(&linalg::transpose(&g), &qm), &g) != qm {
                v.push(format!("σ{i} does not preserve the intersection form"));
            }
        }
    }
    if let (Some(q), 7) = (&m.pairing, m.rank) {
        for (sigma, j, row) in EXPECTED_INTERSECTIONS {
            let img = image_of(m, sigma, j);
            for (mi, &expect) in row.iter().enumerate() {
                let got = pair(q, &img, &unit(7, mi + 1));
                if got != expect {
                    v.push(format!(
                        "(σ{sigma}(l{j}).l{}) = {got}, expected {expect}",
                        mi + 1
                    ));
                }
            }
        }
    }
    (v.is_empty(), v)
}

/// Compares the pairing-predicted `(σ_i(ℓ_j).ℓ_m)` with the geometric
/// intersection of the conjugated lines on the surface of `spec`, for all
/// `i in 1..=4`, `j, m in 1..=6`. Returns the mismatches.
pub fn cross_check_with_lines(m: &GaloisLatticeModule, spec: &SurfaceSpec) -> Result<Vec<String>> {
    let q = m
        .pairing
        .as_ref()
        .ok_or_else(|| Error::InvalidModule("module carries no intersection form".into()))?;
    let tower = spec.tower()?;
    let labels = blowdown_labels();
    let base: Vec<_> = labels
        .iter()
        .map(|&l| line(spec, &tower, l))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for sigma in 1..=4 {
        for j in 1..=6 {
            let conj = base[j - 1].conjugate(sigma);
            let img = image_of(m, sigma, j);
            for mi in 1..=6 {
                let predicted = pair(q, &img, &unit(7, mi));
                let other = &base[mi - 1];
                let geometric = if conj.same_as(other)? {
                    -1
                } else {
                    i64::from(intersection_number(&conj, other)?)
                };
                if predicted != geometric {
                    out.push(format!(
                        "(σ{sigma}(l{j}).l{mi}): matrix {predicted}, lines {geometric} ({} vs {})",
                        conj.label, other.label
                    ));
                }
            }
        }
    }
    Ok(out)
}
