//! Finite-dimensional Lie algebras given by rational structure constants.
//!
//! `[e_i, e_j] = sum_k c^k_ij e_k`. Points of the dual use the dual basis, and
//! the coadjoint action follows `<ad*_xi x, y> = -<x, [xi, y]>`, which makes
//! the coordinate brackets `{z_i, z_j} = sum_k c^k_ij z_k`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rat::{fmt_q, parse_q, q, random_vec, Q};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coordinates in the basis of `g` (or, for points of `g*`, the dual basis).
pub type Element = Vec<Q>;

/// Number of independent samples for probabilistic computations.
pub const GENERIC_SAMPLES: usize = 5;
/// Numerator/denominator bound for sampled rationals.
pub const SAMPLE_BOUND: i64 = 100;
const MAX_RESAMPLE_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    basis: Vec<String>,
    /// Only `i < j` is stored.
    structure: BTreeMap<(usize, usize), BTreeMap<usize, Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiReport {
    pub pass: bool,
    /// First violating `(i, j, k, l)`.
    pub witness: Option<[usize; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BracketEntry {
    i: usize,
    j: usize,
    coeffs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    dim: usize,
    basis: Vec<String>,
    brackets: Vec<BracketEntry>,
}

impl LieAlgebra {
    /// Builds an algebra from `(i, j) -> {k: c}` entries. Entries with `i > j`
    /// are folded in with a sign flip; conflicting or diagonal entries are rejected.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        entries: impl IntoIterator<Item = ((usize, usize), BTreeMap<usize, Q>)>,
    ) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::BadAlgebra("dimension must be positive".into()));
        }
        let mut structure: BTreeMap<(usize, usize), BTreeMap<usize, Q>> = BTreeMap::new();
        for ((i, j), coeffs) in entries {
            if i >= n || j >= n || coeffs.keys().any(|&k| k >= n) {
                return Err(Error::BadAlgebra(format!("index out of range in bracket ({i},{j})")));
            }
            if i == j {
                if coeffs.values().any(|c| !c.is_zero()) {
                    return Err(Error::BadAlgebra(format!("[e_{i}, e_{i}] must vanish")));
                }
                continue;
            }
            let (key, sign) = if i < j { ((i, j), Q::one()) } else { ((j, i), -Q::one()) };
            let slot = structure.entry(key).or_default();
            for (k, c) in coeffs {
                if c.is_zero() {
                    continue;
                }
                let c = c * &sign;
                if let Some(old) = slot.get(&k) {
                    if *old != c {
                        return Err(Error::BadAlgebra(format!(
                            "antisymmetry violated for ({i},{j}) component {k}"
                        )));
                    }
                }
                slot.insert(k, c);
            }
        }
        structure.retain(|_, m| !m.is_empty());
        Ok(Self {
            name: name.into(),
            basis,
            structure,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.is_empty()
    }

    /// `c^k_ij` for any ordering of `i, j`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> Q {
        if i == j {
            return Q::zero();
        }
        let (key, neg) = if i < j { ((i, j), false) } else { ((j, i), true) };
        match self.structure.get(&key).and_then(|m| m.get(&k)) {
            Some(v) if neg => -v.clone(),
            Some(v) => v.clone(),
            None => Q::zero(),
        }
    }

    /// `[e_i, e_j]` as a sparse map.
    pub fn basis_bracket(&self, i: usize, j: usize) -> BTreeMap<usize, Q> {
        if i == j {
            return BTreeMap::new();
        }
        let (key, neg) = if i < j { ((i, j), false) } else { ((j, i), true) };
        self.structure
            .get(&key)
            .map(|m| {
                m.iter()
                    .map(|(&k, v)| (k, if neg { -v.clone() } else { v.clone() }))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Replaces one structure constant `c^k_ij` (and its antisymmetric partner).
    /// Used to build deliberately broken algebras.
    pub fn with_constant(&self, i: usize, j: usize, k: usize, value: Q) -> Result<Self> {
        let n = self.dim();
        if i >= n || j >= n || k >= n || i == j {
            return Err(Error::BadAlgebra("invalid constant index".into()));
        }
        let mut out = self.clone();
        let (key, v) = if i < j { ((i, j), value) } else { ((j, i), -value) };
        let slot = out.structure.entry(key).or_default();
        if v.is_zero() {
            slot.remove(&k);
        } else {
            slot.insert(k, v);
        }
        out.structure.retain(|_, m| !m.is_empty());
        Ok(out)
    }

    fn check_len(&self, x: &[Q]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Result<Element> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut out = vec![Q::zero(); self.dim()];
        for (&(i, j), m) in &self.structure {
            // x_i y_j - x_j y_i multiplies c^k_ij for i < j.
            let w = &x[i] * &y[j] - &x[j] * &y[i];
            if w.is_zero() {
                continue;
            }
            for (&k, c) in m {
                out[k] += &w * c;
            }
        }
        Ok(out)
    }

    /// Exhaustive check of the Jacobi identity on all index quadruples.
    pub fn verify_jacobi(&self) -> JacobiReport {
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let v: Q = (0..n)
                            .map(|m| {
                                self.c(i, j, m) * self.c(m, k, l)
                                    + self.c(j, k, m) * self.c(m, i, l)
                                    + self.c(k, i, m) * self.c(m, j, l)
                            })
                            .sum();
                        if !v.is_zero() {
                            return JacobiReport {
                                pass: false,
                                witness: Some([i, j, k, l]),
                                value: Some(fmt_q(&v)),
                            };
                        }
                    }
                }
            }
        }
        JacobiReport {
            pass: true,
            witness: None,
            value: None,
        }
    }

    /// Matrix of `ad*_xi` on `g*`: `(ad*_xi x)_j = -sum_{i,k} xi_i c^k_ij x_k`.
    pub fn coadjoint_matrix(&self, xi: &[Q]) -> Result<Matrix> {
        self.check_len(xi)?;
        let n = self.dim();
        let mut m = linalg::zeros(n, n);
        for (i, xi_i) in xi.iter().enumerate() {
            if xi_i.is_zero() {
                continue;
            }
            for (j, row) in m.iter_mut().enumerate() {
                for (k, c) in self.basis_bracket(i, j) {
                    row[k] -= xi_i * &c;
                }
            }
        }
        Ok(m)
    }

    /// Matrix `A(x)` with `A(x) xi = ad*_xi x`; its entries are `P^{ji}(x)`
    /// of the Lie-Poisson bivector, so its kernel is the stabilizer.
    pub fn coadjoint_orbit_map(&self, x: &[Q]) -> Result<Matrix> {
        self.check_len(x)?;
        let n = self.dim();
        let mut m = linalg::zeros(n, n);
        for (j, row) in m.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                // -sum_k c^k_ij x_k
                *slot = self
                    .basis_bracket(i, j)
                    .iter()
                    .fold(Q::zero(), |acc, (&k, c)| acc - c * &x[k]);
            }
        }
        Ok(m)
    }

    /// Exact basis of `{ xi : ad*_xi x = 0 }`.
    pub fn stabilizer(&self, x: &[Q]) -> Result<Vec<Element>> {
        let a = self.coadjoint_orbit_map(x)?;
        Ok(linalg::null_space(&a, self.dim()))
    }

    /// Dimension of the coadjoint orbit through `x`.
    pub fn orbit_dim(&self, x: &[Q]) -> Result<usize> {
        Ok(linalg::rank(&self.coadjoint_orbit_map(x)?))
    }

    /// Whether the span of `basis` is closed under the bracket.
    pub fn is_subalgebra(&self, basis: &[Element]) -> Result<bool> {
        for v in basis {
            self.check_len(v)?;
        }
        let span = linalg::span_basis(basis);
        let r = span.len();
        for (a, x) in basis.iter().enumerate() {
            for y in &basis[a + 1..] {
                let z = self.bracket(x, y)?;
                let mut ext = span.clone();
                ext.push(z);
                if linalg::rank(&ext) > r {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `dim ker(ad_xi |_h)` for `xi` in the subalgebra `h` spanned by `basis`
    /// (taken linearly independent).
    fn centralizer_dim(&self, basis: &[Element], xi: &[Q]) -> Result<usize> {
        let d = basis.len();
        if d == 0 {
            return Ok(0);
        }
        // Columns: [xi, b_a] for each basis vector; kernel of the coefficient map.
        let images: Vec<Element> = basis.iter().map(|b| self.bracket(xi, b)).collect::<Result<_>>()?;
        let m: Matrix = (0..self.dim())
            .map(|row| images.iter().map(|v| v[row].clone()).collect())
            .collect();
        Ok(d - linalg::rank(&m))
    }

    /// Probabilistic rank of the algebra or of a subalgebra: the minimal
    /// centralizer dimension over random elements.
    pub fn algebra_rank<R: Rng + ?Sized>(&self, subspace: Option<&[Element]>, rng: &mut R) -> Result<usize> {
        let basis: Vec<Element> = match subspace {
            None => (0..self.dim()).map(|i| unit(self.dim(), i)).collect(),
            Some(b) => {
                if !self.is_subalgebra(b)? {
                    return Err(Error::NotSubalgebra);
                }
                linalg::span_basis(b)
            }
        };
        if basis.is_empty() {
            return Ok(0);
        }
        let mut best = usize::MAX;
        for _ in 0..MAX_RESAMPLE_ROUNDS {
            let dims: Vec<usize> = (0..GENERIC_SAMPLES)
                .map(|_| {
                    let w = random_vec(rng, basis.len(), SAMPLE_BOUND);
                    let xi = combine(&basis, &w);
                    self.centralizer_dim(&basis, &xi)
                })
                .collect::<Result<_>>()?;
            let lo = *dims.iter().min().unwrap();
            best = best.min(lo);
            if dims.iter().all(|&d| d == lo) {
                break;
            }
        }
        Ok(best)
    }

    /// Generic coadjoint orbit dimension, `dim g - rank g`.
    pub fn generic_orbit_dim<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        Ok(self.dim() - self.algebra_rank(None, rng)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        if file.basis.len() != file.dim {
            return Err(Error::BadAlgebra(format!(
                "basis has {} labels, dim is {}",
                file.basis.len(),
                file.dim
            )));
        }
        let mut entries = Vec::new();
        for b in file.brackets {
            if b.i >= b.j {
                return Err(Error::BadAlgebra(format!(
                    "bracket entries need i < j, got ({}, {})",
                    b.i, b.j
                )));
            }
            let mut coeffs = BTreeMap::new();
            for (k, v) in b.coeffs {
                let k: usize = k.parse().map_err(|_| Error::BadAlgebra(format!("bad index `{k}`")))?;
                coeffs.insert(k, parse_q(&v)?);
            }
            entries.push(((b.i, b.j), coeffs));
        }
        Self::new(file.name, file.basis, entries)
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            name: self.name.clone(),
            dim: self.dim(),
            basis: self.basis.clone(),
            brackets: self
                .structure
                .iter()
                .map(|(&(i, j), m)| BracketEntry {
                    i,
                    j,
                    coeffs: m.iter().map(|(k, v)| (k.to_string(), fmt_q(v))).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Structure constants of the span of square matrices `mats` under the commutator.
    pub fn from_matrix_basis(name: &str, labels: &[&str], mats: &[Matrix]) -> Result<Self> {
        let d = mats.len();
        let flat: Vec<Vec<Q>> = mats.iter().map(|m| m.iter().flatten().cloned().collect()).collect();
        let cols = linalg::transpose(&flat);
        if linalg::rank(&flat) != d {
            return Err(Error::BadAlgebra("matrix basis is linearly dependent".into()));
        }
        let mut entries = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                let ab = linalg::mat_mul(&mats[i], &mats[j]);
                let ba = linalg::mat_mul(&mats[j], &mats[i]);
                let comm: Vec<Q> = ab
                    .iter()
                    .flatten()
                    .zip(ba.iter().flatten())
                    .map(|(x, y)| x - y)
                    .collect();
                let coeffs = solve_in_basis(&cols, &comm)
                    .ok_or_else(|| Error::BadAlgebra("matrix span not closed under commutator".into()))?;
                let m: BTreeMap<usize, Q> = coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
                entries.push(((i, j), m));
            }
        }
        Self::new(name, labels.iter().map(|s| s.to_string()).collect(), entries)
    }

    /// Catalog: `sl2`, `so3`, `sl3`, `gl2`, `abelianN`.
    pub fn catalog(name: &str) -> Result<Self> {
        match name {
            "sl2" => Ok(sl2()),
            "so3" => Ok(so3()),
            "sl3" => Ok(sl3()),
            "gl2" => Ok(gl2()),
            _ => {
                if let Some(d) = name.strip_prefix("abelian").and_then(|s| s.parse::<usize>().ok()) {
                    if d > 0 {
                        return Ok(abelian(d));
                    }
                }
                Err(Error::UnknownAlgebra(name.to_string()))
            }
        }
    }

    pub fn catalog_names() -> &'static [&'static str] {
        &["sl2", "so3", "sl3", "gl2"]
    }
}

/// Solves `cols * c = target` exactly, `cols` given row-major (one row per coordinate).
fn solve_in_basis(cols: &Matrix, target: &[Q]) -> Option<Vec<Q>> {
    let d = cols.first().map_or(0, Vec::len);
    let mut aug: Matrix = cols
        .iter()
        .zip(target)
        .map(|(row, t)| row.iter().cloned().chain(std::iter::once(t.clone())).collect())
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots.contains(&d) {
        return None;
    }
    let mut c = vec![Q::zero(); d];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = aug[r][d].clone();
    }
    Some(c)
}

pub fn unit(n: usize, i: usize) -> Element {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// `sum_a w_a basis_a`.
pub fn combine(basis: &[Element], w: &[Q]) -> Element {
    let n = basis.first().map_or(0, Vec::len);
    let mut out = vec![Q::zero(); n];
    for (b, c) in basis.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

fn mat(n: usize, entries: &[(usize, usize, i64)]) -> Matrix {
    let mut m = linalg::zeros(n, n);
    for &(i, j, v) in entries {
        m[i][j] = q(v);
    }
    m
}

/// Basis `(h, e, f)` with `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
pub fn sl2() -> LieAlgebra {
    let h = mat(2, &[(0, 0, 1), (1, 1, -1)]);
    let e = mat(2, &[(0, 1, 1)]);
    let f = mat(2, &[(1, 0, 1)]);
    LieAlgebra::from_matrix_basis("sl2", &["h", "e", "f"], &[h, e, f]).expect("sl2")
}

/// `[e_i, e_j] = eps_ijk e_k`.
pub fn so3() -> LieAlgebra {
    let mut entries = Vec::new();
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        entries.push(((i, j), BTreeMap::from([(k, q(1))])));
    }
    LieAlgebra::new("so3", vec!["l1".into(), "l2".into(), "l3".into()], entries).expect("so3")
}

/// Chevalley basis `(h1, h2, e1, e2, e3, f1, f2, f3)` with `e1 = E12`,
/// `e2 = E23`, `e3 = E13` and transposes for the `f`.
pub fn sl3() -> LieAlgebra {
    let e = |i: usize, j: usize| mat(3, &[(i, j, 1)]);
    let h1 = mat(3, &[(0, 0, 1), (1, 1, -1)]);
    let h2 = mat(3, &[(1, 1, 1), (2, 2, -1)]);
    LieAlgebra::from_matrix_basis(
        "sl3",
        &["h1", "h2", "e1", "e2", "e3", "f1", "f2", "f3"],
        &[h1, h2, e(0, 1), e(1, 2), e(0, 2), e(1, 0), e(2, 1), e(2, 0)],
    )
    .expect("sl3")
}

/// Basis `(E11, E12, E21, E22)`.
pub fn gl2() -> LieAlgebra {
    let e = |i: usize, j: usize| mat(2, &[(i, j, 1)]);
    LieAlgebra::from_matrix_basis(
        "gl2",
        &["E11", "E12", "E21", "E22"],
        &[e(0, 0), e(0, 1), e(1, 0), e(1, 1)],
    )
    .expect("gl2")
}

pub fn abelian(d: usize) -> LieAlgebra {
    LieAlgebra::new(
        format!("abelian{d}"),
        (1..=d).map(|i| format!("a{i}")).collect(),
        Vec::new(),
    )
    .expect("abelian")
}

/// Matrix bases behind the matrix-algebra catalog entries, used to build
/// trace-form invariants. `None` for algebras without a matrix model here.
pub fn matrix_model(name: &str) -> Option<Vec<Matrix>> {
    let e2 = |i: usize, j: usize| mat(2, &[(i, j, 1)]);
    let e3 = |i: usize, j: usize| mat(3, &[(i, j, 1)]);
    match name {
        "sl2" => Some(vec![mat(2, &[(0, 0, 1), (1, 1, -1)]), e2(0, 1), e2(1, 0)]),
        "gl2" => Some(vec![e2(0, 0), e2(0, 1), e2(1, 0), e2(1, 1)]),
        "sl3" => Some(vec![
            mat(3, &[(0, 0, 1), (1, 1, -1)]),
            mat(3, &[(1, 1, 1), (2, 2, -1)]),
            e3(0, 1),
            e3(1, 2),
            e3(0, 2),
            e3(1, 0),
            e3(2, 1),
            e3(2, 0),
        ]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn sl2_constants() {
        let g = sl2();
        assert_eq!(g.basis_bracket(0, 1), BTreeMap::from([(1, q(2))]));
        assert_eq!(g.basis_bracket(0, 2), BTreeMap::from([(2, q(-2))]));
        assert_eq!(g.basis_bracket(1, 2), BTreeMap::from([(0, q(1))]));
        assert_eq!(g.bracket(&unit(3, 0), &unit(3, 1)).unwrap(), vec![q(0), q(2), q(0)]);
        let x = vec![q(3), frac(-1, 2), q(7)];
        assert!(g.bracket(&x, &x).unwrap().iter().all(Zero::is_zero));
        assert!(g.bracket(&x, &[q(1)]).is_err());
    }

    #[test]
    fn so3_epsilon() {
        let g = so3();
        assert_eq!(g.bracket(&unit(3, 0), &unit(3, 1)).unwrap(), unit(3, 2));
        assert_eq!(g.bracket(&unit(3, 2), &unit(3, 1)).unwrap(), vec![q(-1), q(0), q(0)]);
    }

    #[test]
    fn catalog_passes_jacobi() {
        for name in LieAlgebra::catalog_names() {
            assert!(LieAlgebra::catalog(name).unwrap().verify_jacobi().pass, "{name}");
        }
        assert!(abelian(4).verify_jacobi().pass);
        assert!(LieAlgebra::catalog("e8").is_err());
    }

    #[test]
    fn corrupted_sl2_fails_with_witness() {
        // Rescaling the h-component of [e, f] keeps a Lie algebra.
        assert!(sl2().with_constant(1, 2, 0, q(2)).unwrap().verify_jacobi().pass);
        // [e, f] = h + e does not.
        let bad = sl2().with_constant(1, 2, 1, q(1)).unwrap();
        let r = bad.verify_jacobi();
        assert!(!r.pass);
        assert_eq!(r.witness, Some([0, 1, 2, 1]));
    }

    #[test]
    fn antisymmetry_checked_on_load() {
        let e = vec![
            ((0, 1), BTreeMap::from([(2, q(1))])),
            ((1, 0), BTreeMap::from([(2, q(1))])),
        ];
        assert!(LieAlgebra::new("bad", vec!["a".into(), "b".into(), "c".into()], e).is_err());
    }

    #[test]
    fn coadjoint_of_h() {
        let g = sl2();
        let m = g.coadjoint_matrix(&unit(3, 0)).unwrap();
        let expect = vec![vec![q(0), q(0), q(0)], vec![q(0), q(-2), q(0)], vec![q(0), q(0), q(2)]];
        assert_eq!(m, expect);
        let z = abelian(3).coadjoint_matrix(&[q(1), q(2), q(3)]).unwrap();
        assert_eq!(z, linalg::zeros(3, 3));
    }

    #[test]
    fn coadjoint_is_linear() {
        let g = sl3();
        let mut r = rng();
        let a = random_vec(&mut r, 8, 9);
        let b = random_vec(&mut r, 8, 9);
        let s: Vec<Q> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let ma = g.coadjoint_matrix(&a).unwrap();
        let mb = g.coadjoint_matrix(&b).unwrap();
        let ms = g.coadjoint_matrix(&s).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(ms[i][j], &ma[i][j] + &mb[i][j]);
            }
        }
    }

    #[test]
    fn coadjoint_matrix_acts_as_orbit_map() {
        // ad*_xi x computed both ways.
        let g = sl3();
        let mut r = rng();
        let xi = random_vec(&mut r, 8, 9);
        let x = random_vec(&mut r, 8, 9);
        let via_matrix = linalg::mat_vec(&g.coadjoint_matrix(&xi).unwrap(), &x);
        let via_orbit = linalg::mat_vec(&g.coadjoint_orbit_map(&x).unwrap(), &xi);
        assert_eq!(via_matrix, via_orbit);
    }

    #[test]
    fn stabilizers() {
        let g = sl2();
        assert_eq!(g.stabilizer(&[q(0), q(0), q(0)]).unwrap().len(), 3);
        let s = g.stabilizer(&unit(3, 0)).unwrap();
        assert_eq!(s, vec![unit(3, 0)]);
        assert_eq!(abelian(2).stabilizer(&[q(1), q(5)]).unwrap().len(), 2);
    }

    #[test]
    fn ranks() {
        let mut r = rng();
        assert_eq!(sl2().algebra_rank(None, &mut r).unwrap(), 1);
        assert_eq!(so3().algebra_rank(None, &mut r).unwrap(), 1);
        assert_eq!(sl3().algebra_rank(None, &mut r).unwrap(), 2);
        assert_eq!(gl2().algebra_rank(None, &mut r).unwrap(), 2);
        assert_eq!(abelian(4).algebra_rank(None, &mut r).unwrap(), 4);
        let stab = sl2().stabilizer(&unit(3, 0)).unwrap();
        assert_eq!(sl2().algebra_rank(Some(&stab), &mut r).unwrap(), 1);
    }

    #[test]
    fn rank_rejects_non_subalgebra() {
        let mut r = rng();
        let sub = vec![unit(3, 1), unit(3, 2)];
        assert_eq!(sl2().algebra_rank(Some(&sub), &mut r), Err(Error::NotSubalgebra));
    }

    #[test]
    fn rank_invariant_under_basis_permutation() {
        // Reverse the sl3 basis order and relabel the constants.
        let g = sl3();
        let n = g.dim();
        let p = |i: usize| n - 1 - i;
        let entries: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                (
                    (p(i), p(j)),
                    g.basis_bracket(i, j).into_iter().map(|(k, c)| (p(k), c)).collect(),
                )
            })
            .collect();
        let labels: Vec<String> = g.basis_labels().iter().rev().cloned().collect();
        let h = LieAlgebra::new("sl3-rev", labels, entries).unwrap();
        assert!(h.verify_jacobi().pass);
        let mut r = rng();
        assert_eq!(
            h.algebra_rank(None, &mut r).unwrap(),
            g.algebra_rank(None, &mut r).unwrap()
        );
    }

    #[test]
    fn orbit_plus_stabilizer_is_dim() {
        let mut r = rng();
        for g in [sl2(), so3(), sl3(), gl2()] {
            for _ in 0..5 {
                let x = random_vec(&mut r, g.dim(), 20);
                let s = g.stabilizer(&x).unwrap().len();
                assert_eq!(s + g.orbit_dim(&x).unwrap(), g.dim());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = sl3();
        let back = LieAlgebra::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"name":"x","dim":2,"basis":["a","b"],"brackets":[{"i":1,"j":0,"coeffs":{"0":"1"}}]}"#;
        assert!(LieAlgebra::from_json(bad).is_err());
    }
}
