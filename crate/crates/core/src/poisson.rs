//! Bivectors with polynomial entries, their brackets, Schouten compatibility
//! tests and exact rank computations over pencils.

use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::linalg::{self, Matrix};
use crate::polyring::Poly;
use crate::rat::{fmt_q, serde_q, Q};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `schouten(P, P) = JACOBIATOR_FACTOR * jacobiator_oracle(P)` component-wise.
pub const JACOBIATOR_FACTOR: i64 = -2;

/// Antisymmetric matrix of polynomials; only `i < j` is stored, zeros omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bivector {
    dim: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

/// Fully antisymmetric 3-tensor; only `i < j < k` is stored, zeros omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivector {
    dim: usize,
    comps: BTreeMap<(usize, usize, usize), Poly>,
}

impl Trivector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Poly {
        let mut idx = [i, j, k];
        let mut sign = 1i64;
        // Bubble sort, tracking the permutation parity.
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = -sign;
                } else if idx[b] == idx[b + 1] {
                    return Poly::zero(self.dim);
                }
            }
        }
        if idx[0] == idx[1] || idx[1] == idx[2] {
            return Poly::zero(self.dim);
        }
        match self.comps.get(&(idx[0], idx[1], idx[2])) {
            Some(p) if sign < 0 => p.neg(),
            Some(p) => p.clone(),
            None => Poly::zero(self.dim),
        }
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize, usize), Poly> {
        &self.comps
    }

    pub fn first_nonzero(&self) -> Option<((usize, usize, usize), &Poly)> {
        self.comps.iter().next().map(|(k, v)| (*k, v))
    }

    pub fn scale(&self, c: &Q) -> Trivector {
        Trivector {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .map(|(k, p)| (*k, p.scale(c)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EntryFile {
    i: usize,
    j: usize,
    poly: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BivectorFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    variables: Vec<String>,
    entries: Vec<EntryFile>,
}

impl Bivector {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Sets `P^{ij}` (and implicitly `P^{ji} = -P^{ij}`).
    pub fn set(&mut self, i: usize, j: usize, p: Poly) -> Result<()> {
        if i >= self.dim || j >= self.dim {
            return Err(Error::VariableOutOfRange {
                index: i.max(j),
                nvars: self.dim,
            });
        }
        if p.nvars() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.nvars(),
            });
        }
        if i == j {
            return if p.is_zero() {
                Ok(())
            } else {
                Err(Error::InvalidSpec("bivector diagonal must vanish".into()))
            };
        }
        let (key, p) = if i < j { ((i, j), p) } else { ((j, i), p.neg()) };
        if p.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, p);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        if i == j {
            return Poly::zero(self.dim);
        }
        let (key, neg) = if i < j { ((i, j), false) } else { ((j, i), true) };
        match self.entries.get(&key) {
            Some(p) if neg => p.neg(),
            Some(p) => p.clone(),
            None => Poly::zero(self.dim),
        }
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Poly> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Linear Lie-Poisson structure `P^{ij}(z) = sum_k c^k_ij z_k`.
    pub fn lie_poisson(g: &LieAlgebra) -> Self {
        let n = g.dim();
        let mut b = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let coeffs: Vec<Q> = (0..n).map(|k| g.c(i, j, k)).collect();
                b.set(i, j, Poly::linear(&coeffs, Q::zero())).expect("in range");
            }
        }
        b
    }

    /// Lie-Poisson structure of `g` with the coordinates frozen at `a`
    /// (constant entries `sum_k c^k_ij a_k`).
    pub fn frozen_lie_poisson(g: &LieAlgebra, a: &[Q]) -> Result<Self> {
        let n = g.dim();
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
        let mut b = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: Q = (0..n).map(|k| g.c(i, j, k) * &a[k]).sum();
                b.set(i, j, Poly::constant(n, v))?;
            }
        }
        Ok(b)
    }

    /// Block bivector on `(p_1, q_1, ..., p_N, q_N)` with `P^{p_j q_j} = weights[j]`.
    pub fn canonical_weighted(weights: &[Q]) -> Self {
        let m = 2 * weights.len();
        let mut b = Self::zero(m);
        for (j, w) in weights.iter().enumerate() {
            b.set(2 * j, 2 * j + 1, Poly::constant(m, w.clone())).expect("in range");
        }
        b
    }

    /// Copy of `self` acting on the variables `offset..offset + dim` of a larger space.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        Self {
            dim: total,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), p)| ((i + offset, j + offset), p.embed(total, offset)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    pub fn try_add(&self, other: &Bivector) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (&(i, j), p) in &other.entries {
            let s = &out.get(i, j) + p;
            out.set(i, j, s)?;
        }
        Ok(out)
    }

    /// `t1 * self + t2 * other`.
    pub fn combine(&self, t1: &Q, other: &Bivector, t2: &Q) -> Result<Self> {
        self.scale(t1).try_add(&other.scale(t2))
    }

    /// `{f, g} = sum_{i,j} P^{ij} d_i f d_j g`.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        for p in [f, g] {
            if p.nvars() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: p.nvars(),
                });
            }
        }
        let df = f.gradient();
        let dg = g.gradient();
        let mut out = Poly::zero(self.dim);
        for (&(i, j), p) in &self.entries {
            // P^{ij} (d_i f d_j g - d_j f d_i g)
            let a = &df[i] * &dg[j];
            let b = &df[j] * &dg[i];
            let w = &a - &b;
            if !w.is_zero() {
                out = &out + &(p * &w);
            }
        }
        Ok(out)
    }

    /// Component `i` is `sum_j P^{ij} d_j H`.
    pub fn hamiltonian_field(&self, h: &Poly) -> Result<Vec<Poly>> {
        if h.nvars() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: h.nvars(),
            });
        }
        let dh = h.gradient();
        let mut out = vec![Poly::zero(self.dim); self.dim];
        for (&(i, j), p) in &self.entries {
            if !dh[j].is_zero() {
                out[i] = &out[i] + &(p * &dh[j]);
            }
            if !dh[i].is_zero() {
                out[j] = &out[j] - &(p * &dh[i]);
            }
        }
        Ok(out)
    }

    /// Nonzero partial derivatives of each stored entry.
    fn derivative_table(&self) -> BTreeMap<(usize, usize), Vec<(usize, Poly)>> {
        self.entries
            .iter()
            .map(|(&k, p)| {
                let d: Vec<(usize, Poly)> = (0..self.dim)
                    .filter_map(|l| {
                        let dp = p.partial(l).expect("in range");
                        (!dp.is_zero()).then_some((l, dp))
                    })
                    .collect();
                (k, d)
            })
            .collect()
    }

    /// Schouten bracket: `[P,Q]^{ijk} = sum_l (P^{il} d_l Q^{jk} + Q^{il} d_l P^{jk})`
    /// summed over the cyclic permutations of `(i, j, k)`.
    pub fn schouten(&self, other: &Bivector) -> Result<Trivector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let m = self.dim;
        let dp = self.derivative_table();
        let dq = other.derivative_table();
        // sum_l A^{al} d_l B^{bc}
        let term =
            |a_biv: &Bivector, db: &BTreeMap<(usize, usize), Vec<(usize, Poly)>>, a: usize, b: usize, c: usize| {
                let (key, neg) = if b < c { ((b, c), false) } else { ((c, b), true) };
                let mut acc = Poly::zero(m);
                if let Some(list) = db.get(&key) {
                    for (l, d) in list {
                        let al = a_biv.get(a, *l);
                        if !al.is_zero() {
                            acc = &acc + &(&al * d);
                        }
                    }
                }
                if neg {
                    acc.neg()
                } else {
                    acc
                }
            };
        let mut comps = BTreeMap::new();
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    let mut acc = Poly::zero(m);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        acc = &acc + &term(self, &dq, a, b, c);
                        acc = &acc + &term(other, &dp, a, b, c);
                    }
                    if !acc.is_zero() {
                        comps.insert((i, j, k), acc);
                    }
                }
            }
        }
        Ok(Trivector { dim: m, comps })
    }

    /// Brute-force Jacobiator `{{x_i,x_j},x_k} + {{x_j,x_k},x_i} + {{x_k,x_i},x_j}`
    /// built only from [`Bivector::bracket`].
    pub fn jacobiator_oracle(&self) -> Trivector {
        let m = self.dim;
        let x: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
        let br = |f: &Poly, g: &Poly| self.bracket(f, g).expect("same dimension");
        let mut comps = BTreeMap::new();
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    let v = &(&br(&br(&x[i], &x[j]), &x[k]) + &br(&br(&x[j], &x[k]), &x[i]))
                        + &br(&br(&x[k], &x[i]), &x[j]);
                    if !v.is_zero() {
                        comps.insert((i, j, k), v);
                    }
                }
            }
        }
        Trivector { dim: m, comps }
    }

    pub fn is_poisson(&self) -> bool {
        self.schouten(self).map(|t| t.is_zero()).unwrap_or(false)
    }

    /// Numeric matrix at a rational point.
    pub fn eval_at(&self, point: &[Q]) -> Result<Matrix> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut m = linalg::zeros(self.dim, self.dim);
        for (&(i, j), p) in &self.entries {
            let v = p.eval(point)?;
            m[j][i] = -v.clone();
            m[i][j] = v;
        }
        Ok(m)
    }

    /// Exact rank at a rational point.
    pub fn rank_at(&self, point: &[Q]) -> Result<usize> {
        Ok(linalg::rank(&self.eval_at(point)?))
    }

    pub fn to_json(&self, names: &[String]) -> String {
        let file = BivectorFile {
            dim: self.dim,
            variables: names.to_vec(),
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), p)| EntryFile {
                    i,
                    j,
                    poly: p.to_text(names),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Reads the JSON form; `names` is used when the file carries no variable list.
    pub fn from_json(text: &str, names: &[String]) -> Result<Self> {
        let file: BivectorFile = serde_json::from_str(text)?;
        let names = if file.variables.is_empty() {
            names.to_vec()
        } else {
            file.variables
        };
        if names.len() != file.dim {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                got: names.len(),
            });
        }
        let mut b = Self::zero(file.dim);
        for e in file.entries {
            b.set(e.i, e.j, Poly::parse(&e.poly, &names)?)?;
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub pass: bool,
    /// First nonzero component `(i, j, k)` of `[P, Q]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

/// `P` and `Q` form a Poisson pair iff `[P, Q] = 0` (given each is Poisson).
pub fn compatibility(p: &Bivector, q: &Bivector) -> Result<CompatibilityReport> {
    let s = p.schouten(q)?;
    Ok(match s.first_nonzero() {
        None => CompatibilityReport {
            pass: true,
            witness: None,
            value: None,
        },
        Some((idx, v)) => CompatibilityReport {
            pass: false,
            witness: Some(idx),
            value: Some(v.to_text(&crate::polyring::default_names(p.dim()))),
        },
    })
}

/// A direction `(t1, t2)` of a pencil `t1 eta1 + t2 eta2`, not both zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilDirection {
    #[serde(with = "serde_q")]
    pub t1: Q,
    #[serde(with = "serde_q")]
    pub t2: Q,
}

impl PencilDirection {
    pub fn new(t1: Q, t2: Q) -> Result<Self> {
        if t1.is_zero() && t2.is_zero() {
            return Err(Error::InvalidSpec("pencil direction (0, 0)".into()));
        }
        Ok(Self { t1, t2 })
    }

    /// The direction `(r, -1)` whose affine parameter `-t1/t2` equals `r`.
    pub fn affine(r: Q) -> Self {
        Self { t1: r, t2: -Q::one() }
    }

    /// `-t1/t2`, when `t2 != 0`.
    pub fn affine_parameter(&self) -> Option<Q> {
        (!self.t2.is_zero()).then(|| -(&self.t1 / &self.t2))
    }

    pub fn is_proportional(&self, other: &PencilDirection) -> bool {
        (&self.t1 * &other.t2 - &self.t2 * &other.t1).is_zero()
    }

    pub fn label(&self) -> String {
        format!("({}, {})", fmt_q(&self.t1), fmt_q(&self.t2))
    }
}

#[derive(Debug, Clone)]
pub struct Pencil {
    pub eta1: Bivector,
    pub eta2: Bivector,
    exceptional: Vec<PencilDirection>,
}

impl Pencil {
    pub fn new(eta1: Bivector, eta2: Bivector, exceptional: Vec<PencilDirection>) -> Result<Self> {
        if eta1.dim() != eta2.dim() {
            return Err(Error::DimensionMismatch {
                expected: eta1.dim(),
                got: eta2.dim(),
            });
        }
        for (a, d) in exceptional.iter().enumerate() {
            if exceptional[..a].iter().any(|e| e.is_proportional(d)) {
                return Err(Error::InvalidSpec(format!(
                    "exceptional direction {} repeated",
                    d.label()
                )));
            }
        }
        Ok(Self {
            eta1,
            eta2,
            exceptional,
        })
    }

    pub fn dim(&self) -> usize {
        self.eta1.dim()
    }

    pub fn exceptional(&self) -> &[PencilDirection] {
        &self.exceptional
    }

    pub fn is_exceptional(&self, t: &PencilDirection) -> bool {
        self.exceptional.iter().any(|e| e.is_proportional(t))
    }

    pub fn at(&self, t: &PencilDirection) -> Bivector {
        self.eta1.combine(&t.t1, &self.eta2, &t.t2).expect("same dimension")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    pub direction: PencilDirection,
    pub rank: usize,
    pub exceptional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankDrop {
    pub direction: PencilDirection,
    pub rank: usize,
    pub drop: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub entries: Vec<RankEntry>,
    /// Largest rank seen over the sampled directions.
    pub generic_rank: usize,
    /// Some sampled direction has full rank (`rank == dim`).
    pub jordan: bool,
    /// Every sampled direction, exceptional ones included, has the same rank.
    pub kronecker: bool,
    /// Rank deficits at the declared exceptional directions.
    pub drops: Vec<RankDrop>,
}

/// Ranks of `t1 eta1 + t2 eta2` at `point` for each sampled direction and for
/// every declared exceptional direction of the pencil.
pub fn rank_profile(pencil: &Pencil, point: &[Q], ts: &[PencilDirection]) -> Result<RankProfile> {
    if ts.is_empty() {
        return Err(Error::InvalidSpec("rank profile needs at least one direction".into()));
    }
    let mut entries = Vec::new();
    for t in ts.iter().chain(pencil.exceptional().iter()) {
        if entries.iter().any(|e: &RankEntry| e.direction.is_proportional(t)) {
            continue;
        }
        let rank = pencil.at(t).rank_at(point)?;
        entries.push(RankEntry {
            direction: t.clone(),
            rank,
            exceptional: pencil.is_exceptional(t),
        });
    }
    let generic_rank = entries.iter().map(|e| e.rank).max().unwrap_or(0);
    let jordan = generic_rank == pencil.dim();
    let kronecker = entries.iter().all(|e| e.rank == entries[0].rank);
    let drops = entries
        .iter()
        .filter(|e| e.exceptional)
        .map(|e| RankDrop {
            direction: e.direction.clone(),
            rank: e.rank,
            drop: generic_rank - e.rank,
        })
        .collect();
    Ok(RankProfile {
        entries,
        generic_rank,
        jordan,
        kronecker,
        drops,
    })
}

/// Diagnostic scan over affine parameters `r` (directions `(r, -1)`); returns
/// the parameters whose rank falls below the maximum seen on the grid.
pub fn scan_rank_drops(pencil: &Pencil, point: &[Q], grid: &[Q]) -> Result<Vec<(Q, usize)>> {
    let ranks: Vec<(Q, usize)> = grid
        .iter()
        .map(|r| {
            Ok((
                r.clone(),
                pencil.at(&PencilDirection::affine(r.clone())).rank_at(point)?,
            ))
        })
        .collect::<Result<_>>()?;
    let top = ranks.iter().map(|(_, k)| *k).max().unwrap_or(0);
    Ok(ranks.into_iter().filter(|(_, k)| *k < top).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{abelian, sl2, so3, unit};
    use crate::rat::{frac, q, random_vec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn sl2_lie_poisson_entries() {
        let p = Bivector::lie_poisson(&sl2());
        assert_eq!(p.get(0, 1), z(3, 1).scale(&q(2)));
        assert_eq!(p.get(0, 2), z(3, 2).scale(&q(-2)));
        assert_eq!(p.get(1, 2), z(3, 0));
        assert_eq!(p.get(2, 1), z(3, 0).neg());
        assert!(Bivector::lie_poisson(&abelian(3)).is_zero());
    }

    #[test]
    fn so3_lie_poisson_is_epsilon() {
        let p = Bivector::lie_poisson(&so3());
        assert_eq!(p.get(0, 1), z(3, 2));
        assert_eq!(p.get(1, 2), z(3, 0));
        assert_eq!(p.get(2, 0), z(3, 1));
    }

    #[test]
    fn canonical_blocks() {
        let b = Bivector::canonical_weighted(&[q(1)]);
        assert_eq!(
            b.eval_at(&[q(0), q(0)]).unwrap(),
            vec![vec![q(0), q(1)], vec![q(-1), q(0)]]
        );
        let b2 = Bivector::canonical_weighted(&[frac(1, 3), q(5)]);
        assert_eq!(b2.get(0, 1), Poly::constant(4, frac(1, 3)));
        assert_eq!(b2.get(2, 3), Poly::constant(4, q(5)));
        assert!(b2.get(1, 2).is_zero());
        assert!(Bivector::canonical_weighted(&[q(0), q(0)]).is_zero());
    }

    #[test]
    fn brackets() {
        let p = Bivector::lie_poisson(&sl2());
        let f = &z(3, 0).pow(2) + &(&z(3, 1) * &z(3, 2)).scale(&q(4));
        assert!(p.bracket(&z(3, 0), &f).unwrap().is_zero());
        assert!(p.bracket(&f, &f).unwrap().is_zero());
        let c = Bivector::canonical_weighted(&[q(1)]);
        assert_eq!(c.bracket(&z(2, 0), &z(2, 1)).unwrap(), Poly::one(2));
        assert!(c.bracket(&z(3, 0), &z(3, 1)).is_err());
    }

    #[test]
    fn coordinate_brackets_follow_structure_constants() {
        let g = crate::liealg::sl3();
        let p = Bivector::lie_poisson(&g);
        let n = g.dim();
        for i in 0..n {
            for j in 0..n {
                let expect = Poly::linear(&(0..n).map(|k| g.c(i, j, k)).collect::<Vec<_>>(), Q::zero());
                assert_eq!(p.bracket(&z(n, i), &z(n, j)).unwrap(), expect);
            }
        }
    }

    #[test]
    fn schouten_of_constant_pair_vanishes() {
        let a = Bivector::canonical_weighted(&[q(1), q(2)]);
        let b = Bivector::canonical_weighted(&[q(3), q(-1)]);
        assert!(a.schouten(&b).unwrap().is_zero());
        assert!(a.jacobiator_oracle().is_zero());
    }

    #[test]
    fn schouten_detects_non_jacobi_constants() {
        let good = Bivector::lie_poisson(&sl2());
        assert!(good.schouten(&good).unwrap().is_zero());
        assert!(good.jacobiator_oracle().is_zero());
        let bad = Bivector::lie_poisson(&sl2().with_constant(1, 2, 1, q(1)).unwrap());
        let s = bad.schouten(&bad).unwrap();
        let j = bad.jacobiator_oracle();
        assert!(s.components().contains_key(&(0, 1, 2)));
        assert!(!j.is_zero());
        assert_eq!(s, j.scale(&q(JACOBIATOR_FACTOR)));
    }

    #[test]
    fn argument_translation_pair_is_compatible() {
        for g in [sl2(), so3(), crate::liealg::sl3()] {
            let a = random_vec(&mut ChaCha8Rng::seed_from_u64(3), g.dim(), 10);
            let p = Bivector::lie_poisson(&g);
            let frozen = Bivector::frozen_lie_poisson(&g, &a).unwrap();
            assert!(compatibility(&p, &frozen).unwrap().pass);
        }
    }

    #[test]
    fn unrelated_lie_poisson_structures_fail() {
        // Solvable [e1,e2] = e2, [e1,e3] = e3 against sl2 on the same coordinates.
        let r3 = LieAlgebra::new(
            "r3",
            vec!["a".into(), "b".into(), "c".into()],
            [
                ((0, 1), BTreeMap::from([(1, q(1))])),
                ((0, 2), BTreeMap::from([(2, q(1))])),
            ],
        )
        .unwrap();
        let r = compatibility(&Bivector::lie_poisson(&sl2()), &Bivector::lie_poisson(&r3)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness, Some((0, 1, 2)));
        assert_eq!(r.value.as_deref(), Some("-2*x0"));
        // sl2 and so3 happen to be compatible.
        assert!(
            compatibility(&Bivector::lie_poisson(&sl2()), &Bivector::lie_poisson(&so3()))
                .unwrap()
                .pass
        );
    }

    #[test]
    fn ranks_at_points() {
        assert_eq!(Bivector::zero(4).rank_at(&[q(1), q(2), q(3), q(4)]).unwrap(), 0);
        let p = Bivector::lie_poisson(&sl2());
        assert_eq!(p.rank_at(&unit(3, 0)).unwrap(), 2);
        assert_eq!(p.rank_at(&[q(0), q(0), q(0)]).unwrap(), 0);
        let c = Bivector::canonical_weighted(&[q(1), frac(2, 3), q(-4)]);
        assert_eq!(
            c.rank_at(&random_vec(&mut ChaCha8Rng::seed_from_u64(1), 6, 9)).unwrap(),
            6
        );
        assert!(p.rank_at(&[q(1)]).is_err());
    }

    #[test]
    fn rank_plus_stabilizer_is_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [sl2(), so3(), crate::liealg::sl3(), crate::liealg::gl2()] {
            let p = Bivector::lie_poisson(&g);
            for _ in 0..5 {
                let x = random_vec(&mut rng, g.dim(), 30);
                assert_eq!(p.rank_at(&x).unwrap() + g.stabilizer(&x).unwrap().len(), g.dim());
            }
        }
    }

    #[test]
    fn hamiltonian_fields() {
        let c = Bivector::canonical_weighted(&[q(1)]);
        assert!(c
            .hamiltonian_field(&Poly::constant(2, q(3)))
            .unwrap()
            .iter()
            .all(Poly::is_zero));
        let h = z(2, 0).pow(2).scale(&frac(1, 2));
        let v = c.hamiltonian_field(&h).unwrap();
        assert!(v[0].is_zero());
        assert_eq!(v[1], z(2, 0).neg());
        let p = Bivector::lie_poisson(&sl2());
        let f = &z(3, 0).pow(2) + &(&z(3, 1) * &z(3, 2)).scale(&q(4));
        assert!(p.hamiltonian_field(&f).unwrap().iter().all(Poly::is_zero));
    }

    #[test]
    fn zero_pencil_profile() {
        let pen = Pencil::new(Bivector::zero(3), Bivector::zero(3), vec![]).unwrap();
        let ts = [PencilDirection::new(q(1), q(0)).unwrap(), PencilDirection::affine(q(2))];
        let prof = rank_profile(&pen, &[q(1), q(2), q(3)], &ts).unwrap();
        assert!(prof.entries.iter().all(|e| e.rank == 0));
        assert!(prof.kronecker);
        assert!(rank_profile(&pen, &[q(1), q(2), q(3)], &[]).is_err());
    }

    #[test]
    fn pencil_rejects_proportional_exceptional() {
        let e = vec![
            PencilDirection::affine(q(1)),
            PencilDirection::new(q(-2), q(2)).unwrap(),
        ];
        assert!(Pencil::new(Bivector::zero(2), Bivector::zero(2), e).is_err());
        assert!(PencilDirection::new(q(0), q(0)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Bivector::lie_poisson(&sl2());
        let names: Vec<String> = ["z1", "z2", "z3"].iter().map(|s| s.to_string()).collect();
        let text = p.to_json(&names);
        assert!(text.contains("\"poly\": \"2*z2\""));
        assert_eq!(Bivector::from_json(&text, &[]).unwrap(), p);
    }
}
