//! Gaudin pencils on `(g*)^N` and on the canonical `R^{2N}` model, the
//! pencil of moment maps, Casimir catalogs and the involutive families.
//!
//! The affine chart of the pencil is `t = (r, -1)`, so that
//! `mu_t = sum_j m_j / (t1 + a_j t2) = sum_j m_j / (r - a_j)` and the exceptional
//! directions `(a_j, -1)` sit at `r = a_j`.

use crate::error::{Error, Result};
use crate::liealg::{self, Element, LieAlgebra};
use crate::linalg::{self, SparseEchelon};
use crate::poisson::{Bivector, Pencil, PencilDirection};
use crate::polyring::{Exponent, PoleComposition, Poly};
use crate::rat::{fmt_q, q, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Input data for the product construction: algebra, distinct weights `a_j`
/// (one per site) and optional orbit representatives.
#[derive(Debug, Clone)]
pub struct GaudinSpec {
    pub algebra: LieAlgebra,
    pub weights: Vec<Q>,
    pub base_points: Option<Vec<Element>>,
}

impl GaudinSpec {
    pub fn new(algebra: LieAlgebra, weights: Vec<Q>, base_points: Option<Vec<Element>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("at least one site is required".into()));
        }
        check_distinct(&weights)?;
        if let Some(bp) = &base_points {
            if bp.len() != weights.len() {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    got: bp.len(),
                });
            }
            if let Some(p) = bp.iter().find(|p| p.len() != algebra.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: algebra.dim(),
                    got: p.len(),
                });
            }
        }
        Ok(Self {
            algebra,
            weights,
            base_points,
        })
    }

    /// Default weights `0, 1, ..., N-1`.
    pub fn with_default_weights(algebra: LieAlgebra, sites: usize) -> Result<Self> {
        Self::new(algebra, (0..sites as i64).map(q).collect(), None)
    }

    pub fn sites(&self) -> usize {
        self.weights.len()
    }

    pub fn ambient(&self) -> usize {
        self.algebra.dim() * self.sites()
    }
}

fn check_distinct(weights: &[Q]) -> Result<()> {
    for (i, a) in weights.iter().enumerate() {
        if weights[..i].contains(a) {
            return Err(Error::RepeatedWeights(fmt_q(a)));
        }
    }
    Ok(())
}

/// `eta1 = sum_j eta_(j)`, `eta2 = sum_j a_j eta_(j)` on `(g*)^N`, with the
/// exceptional directions `(a_j, -1)`.
pub fn build_pencil(spec: &GaudinSpec) -> Result<Pencil> {
    let n = spec.algebra.dim();
    let total = spec.ambient();
    let lp = Bivector::lie_poisson(&spec.algebra);
    let mut eta1 = Bivector::zero(total);
    let mut eta2 = Bivector::zero(total);
    for (j, a) in spec.weights.iter().enumerate() {
        let block = lp.embed(total, j * n);
        eta1 = eta1.try_add(&block)?;
        eta2 = eta2.try_add(&block.scale(a))?;
    }
    let exceptional = spec
        .weights
        .iter()
        .map(|a| PencilDirection::new(a.clone(), -Q::one()))
        .collect::<Result<_>>()?;
    Pencil::new(eta1, eta2, exceptional)
}

/// Certified Casimir generators of the Lie-Poisson structure of an algebra.
#[derive(Debug, Clone)]
pub struct CasimirSet {
    algebra: LieAlgebra,
    generators: Vec<Poly>,
}

impl CasimirSet {
    /// Accepts candidates only if `{z_i, f} = 0` for every coordinate `z_i`.
    pub fn certify(algebra: &LieAlgebra, candidates: Vec<Poly>) -> Result<Self> {
        let n = algebra.dim();
        let lp = Bivector::lie_poisson(algebra);
        for (index, f) in candidates.iter().enumerate() {
            if f.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.nvars(),
                });
            }
            for i in 0..n {
                if !lp.bracket(&Poly::var(n, i), f)?.is_zero() {
                    return Err(Error::NotCasimir { index, coordinate: i });
                }
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            generators: candidates,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }
}

/// Catalog Casimirs: `sl2 -> z1^2 + 4 z2 z3`, `so3 -> z1^2 + z2^2 + z3^2`,
/// `sl3 -> tr X^2, tr X^3`, `gl2 -> tr X, tr X^2`, abelian -> coordinates.
pub fn casimirs(g: &LieAlgebra) -> Result<CasimirSet> {
    let n = g.dim();
    let z = |i: usize| Poly::var(n, i);
    let gens = if g.is_abelian() {
        (0..n).map(z).collect()
    } else {
        match g.name() {
            "sl2" => vec![&z(0).pow(2) + &(&z(1) * &z(2)).scale(&q(4))],
            "so3" => vec![&(&z(0).pow(2) + &z(1).pow(2)) + &z(2).pow(2)],
            "sl3" => trace_invariants(g.name(), n, &[2, 3])?,
            "gl2" => trace_invariants(g.name(), n, &[1, 2])?,
            other => return Err(Error::NoCasimirs(other.to_string())),
        }
    };
    CasimirSet::certify(g, gens)
}

/// `tr X^k` for `X = sum_b z_b B_b^#`, the dual basis under the trace form,
/// scaled to primitive integer coefficients.
fn trace_invariants(name: &str, n: usize, degrees: &[u32]) -> Result<Vec<Poly>> {
    let mats = liealg::matrix_model(name).ok_or_else(|| Error::NoCasimirs(name.to_string()))?;
    let size = mats[0].len();
    let trace = |a: &linalg::Matrix| (0..size).fold(Q::zero(), |acc, i| acc + &a[i][i]);
    let gram: linalg::Matrix = mats
        .iter()
        .map(|a| mats.iter().map(|b| trace(&linalg::mat_mul(a, b))).collect())
        .collect();
    let inv = invert(&gram).ok_or_else(|| Error::NoCasimirs(format!("{name}: degenerate trace form")))?;
    // X = sum_b z_b sum_c inv[b][c] B_c
    let mut x = vec![vec![Poly::zero(n); size]; size];
    for (b, row) in inv.iter().enumerate() {
        for (c, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let zb = Poly::var(n, b).scale(w);
            for r in 0..size {
                for s in 0..size {
                    if !mats[c][r][s].is_zero() {
                        x[r][s] = &x[r][s] + &zb.scale(&mats[c][r][s]);
                    }
                }
            }
        }
    }
    let mul = |a: &Vec<Vec<Poly>>, b: &Vec<Vec<Poly>>| -> Vec<Vec<Poly>> {
        (0..size)
            .map(|r| {
                (0..size)
                    .map(|s| (0..size).fold(Poly::zero(n), |acc, k| &acc + &(&a[r][k] * &b[k][s])))
                    .collect()
            })
            .collect()
    };
    let mut out = Vec::new();
    for &d in degrees {
        let mut p = x.clone();
        for _ in 1..d {
            p = mul(&p, &x);
        }
        let tr = (0..size).fold(Poly::zero(n), |acc, i| &acc + &p[i][i]);
        out.push(primitive(&tr));
    }
    Ok(out)
}

fn invert(m: &linalg::Matrix) -> Option<linalg::Matrix> {
    let n = m.len();
    let mut aug: linalg::Matrix = m
        .iter()
        .zip(linalg::identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots != (0..n).collect::<Vec<_>>() {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Scales to integer coefficients with gcd one and a positive leading term.
pub fn primitive(p: &Poly) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let lcm = p.terms().values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled = p.scale(&Q::from_integer(lcm));
    let gcd = scaled
        .terms()
        .values()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
    let lead_neg = scaled.sorted_terms()[0].1 < &Q::zero();
    let mut s = Q::new(BigInt::one(), gcd);
    if lead_neg {
        s = -s;
    }
    scaled.scale(&s)
}

/// Where a family member came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Coefficient of `(r - a_j)^order` in `f_casimir(mu_r)`.
    Pole { casimir: usize, pole: String, order: i64 },
    /// `lambda^order` coefficient of `f_casimir(x + lambda a)` on `g*`.
    Shift { casimir: usize, lambda_order: i64 },
    /// A shift member pulled back along `mu_t0`.
    Translation {
        casimir: usize,
        lambda_order: i64,
        t0: PencilDirection,
    },
    /// `f_casimir(mu_t)` at a sampled direction.
    Pullback { casimir: usize, t: PencilDirection },
    /// Read from a file.
    Input { label: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub poly: Poly,
    pub provenance: Provenance,
}

/// A finite generating set of first integrals with provenance.
#[derive(Debug, Clone)]
pub struct IntegralFamily {
    names: Vec<String>,
    members: Vec<Member>,
    span: SparseEchelon<Exponent>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MemberFile {
    poly: String,
    provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyFile {
    ambient: usize,
    variables: Vec<String>,
    members: Vec<MemberFile>,
}

impl IntegralFamily {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            members: Vec::new(),
            span: SparseEchelon::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.members.iter().map(|m| &m.poly)
    }

    fn check(&self, p: &Poly) -> Result<()> {
        if p.nvars() != self.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                got: p.nvars(),
            });
        }
        Ok(())
    }

    /// Adds unless zero or an exact linear combination of current members.
    pub fn push_independent(&mut self, poly: Poly, provenance: Provenance) -> Result<bool> {
        self.check(&poly)?;
        if poly.is_zero() || !self.span.insert(&poly.coefficient_vector()) {
            return Ok(false);
        }
        self.members.push(Member { poly, provenance });
        Ok(true)
    }

    /// Adds unless an identical polynomial is already present.
    pub fn push_distinct(&mut self, poly: Poly, provenance: Provenance) -> Result<bool> {
        self.check(&poly)?;
        if self.members.iter().any(|m| m.poly == poly) {
            return Ok(false);
        }
        self.span.insert(&poly.coefficient_vector());
        self.members.push(Member { poly, provenance });
        Ok(true)
    }

    /// Whether `p` is an exact linear combination of the members.
    pub fn spans(&self, p: &Poly) -> bool {
        self.span.contains(&p.coefficient_vector())
    }

    /// Dimension of the linear span of the members.
    pub fn span_dim(&self) -> usize {
        self.span.rank()
    }

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            ambient: self.ambient(),
            variables: self.names.clone(),
            members: self
                .members
                .iter()
                .map(|m| MemberFile {
                    poly: m.poly.to_text(&self.names),
                    provenance: m.provenance.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Loads a family; members are kept as written (only exact duplicates dropped).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        if file.variables.len() != file.ambient {
            return Err(Error::DimensionMismatch {
                expected: file.ambient,
                got: file.variables.len(),
            });
        }
        let mut fam = Self::new(file.variables);
        for m in file.members {
            let p = Poly::parse(&m.poly, &fam.names)?;
            fam.push_distinct(p, m.provenance)?;
        }
        Ok(fam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `(g*)^N` with the Lie-Poisson blocks.
    Product,
    /// `R^{2N}` with canonical blocks and the diagonal `SL(2)` action.
    Sl2Canonical,
}

/// A pencil with a diagonal hamiltonian action, its per-site moment
/// components `m_j` and the Casimirs used to build families.
#[derive(Debug, Clone)]
pub struct GaudinModel {
    kind: ModelKind,
    algebra: LieAlgebra,
    weights: Vec<Q>,
    names: Vec<String>,
    site_moments: Vec<Vec<Poly>>,
    pencil: Pencil,
    casimirs: CasimirSet,
}

impl GaudinModel {
    pub fn product(spec: &GaudinSpec) -> Result<Self> {
        Self::product_with(spec, casimirs(&spec.algebra)?)
    }

    /// Product model with explicitly certified Casimirs.
    pub fn product_with(spec: &GaudinSpec, casimirs: CasimirSet) -> Result<Self> {
        if casimirs.algebra().dim() != spec.algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.algebra.dim(),
                got: casimirs.algebra().dim(),
            });
        }
        let n = spec.algebra.dim();
        let total = spec.ambient();
        let names = (0..spec.sites())
            .flat_map(|j| (0..n).map(move |k| format!("z{}_{}", k + 1, j + 1)))
            .collect();
        let site_moments = (0..spec.sites())
            .map(|j| (0..n).map(|k| Poly::var(total, j * n + k)).collect())
            .collect();
        Ok(Self {
            kind: ModelKind::Product,
            algebra: spec.algebra.clone(),
            weights: spec.weights.clone(),
            names,
            site_moments,
            pencil: build_pencil(spec)?,
            casimirs,
        })
    }

    /// `R^{2N}` with coordinates `(p_1, q_1, ..., p_N, q_N)`,
    /// `eta1 = sum dp_j ^ dq_j`, `eta2 = sum a_j dp_j ^ dq_j`, and site moments
    /// `(-p_j q_j, -q_j^2 / 2, p_j^2 / 2)` in the `sl2` dual coordinates.
    pub fn sl2_canonical(weights: Vec<Q>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("at least one site is required".into()));
        }
        check_distinct(&weights)?;
        let nsites = weights.len();
        let m = 2 * nsites;
        let names = (1..=nsites).flat_map(|j| [format!("p{j}"), format!("q{j}")]).collect();
        let half = Q::new(1.into(), 2.into());
        let site_moments = (0..nsites)
            .map(|j| {
                let p = Poly::var(m, 2 * j);
                let qv = Poly::var(m, 2 * j + 1);
                vec![(&p * &qv).neg(), qv.pow(2).scale(&-half.clone()), p.pow(2).scale(&half)]
            })
            .collect();
        let eta1 = Bivector::canonical_weighted(&vec![Q::one(); nsites]);
        let eta2 = Bivector::canonical_weighted(&weights);
        let exceptional = weights
            .iter()
            .map(|a| PencilDirection::new(a.clone(), -Q::one()))
            .collect::<Result<_>>()?;
        let algebra = liealg::sl2();
        Ok(Self {
            kind: ModelKind::Sl2Canonical,
            casimirs: casimirs(&algebra)?,
            algebra,
            weights,
            names,
            site_moments,
            pencil: Pencil::new(eta1, eta2, exceptional)?,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn sites(&self) -> usize {
        self.weights.len()
    }

    pub fn ambient(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    pub fn casimirs(&self) -> &CasimirSet {
        &self.casimirs
    }

    pub fn site_moments(&self) -> &[Vec<Poly>] {
        &self.site_moments
    }

    pub fn empty_family(&self) -> IntegralFamily {
        IntegralFamily::new(self.names.clone())
    }

    /// Coordinates of site `j` inside an ambient point (product model only).
    pub fn site_slice<'a>(&self, point: &'a [Q], j: usize) -> &'a [Q] {
        let n = self.algebra.dim();
        &point[j * n..(j + 1) * n]
    }

    /// `mu_t = sum_j m_j / (t1 + a_j t2)`, one polynomial per coordinate of `g*`.
    pub fn moment_map(&self, t: &PencilDirection) -> Result<Vec<Poly>> {
        let n = self.algebra.dim();
        let mut out = vec![Poly::zero(self.ambient()); n];
        for (j, (a, m)) in self.weights.iter().zip(&self.site_moments).enumerate() {
            let d = &t.t1 + a * &t.t2;
            if d.is_zero() {
                return Err(Error::ExceptionalDirection {
                    t1: fmt_q(&t.t1),
                    t2: fmt_q(&t.t2),
                    site: j,
                });
            }
            let w = Q::one() / d;
            for (o, mk) in out.iter_mut().zip(m) {
                *o = &*o + &mk.scale(&w);
            }
        }
        Ok(out)
    }

    /// `f(mu_r)` for the Casimir with index `casimir`, as a function of `r`.
    pub fn composition(&self, casimir: usize) -> Result<PoleComposition> {
        let f = &self.casimirs.generators()[casimir];
        PoleComposition::new(f, &self.site_moments, &self.weights, self.ambient())
    }

    /// Every nonzero principal-part coefficient at every pole, for every
    /// Casimir, in order; nothing is deduplicated.
    pub fn pole_coefficients(&self) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        for c in 0..self.casimirs.generators().len() {
            let comp = self.composition(c)?;
            for a in &self.weights {
                for (&order, p) in comp.principal_part(a)?.coeffs() {
                    out.push(Member {
                        poly: p.clone(),
                        provenance: Provenance::Pole {
                            casimir: c,
                            pole: fmt_q(a),
                            order,
                        },
                    });
                }
            }
        }
        Ok(out)
    }
}

/// The family generated by all Laurent principal parts of `f(mu_r)` at the
/// poles `r = a_j`, with exact linear dependents dropped.
pub fn family_f(model: &GaudinModel) -> Result<IntegralFamily> {
    let mut fam = model.empty_family();
    for m in model.pole_coefficients()? {
        fam.push_independent(m.poly, m.provenance)?;
    }
    Ok(fam)
}

/// The same family generated by sampling `f(mu_t)` at the given directions.
pub fn family_f_sampled(model: &GaudinModel, ts: &[PencilDirection]) -> Result<IntegralFamily> {
    let mut fam = model.empty_family();
    for t in ts {
        let mu = model.moment_map(t)?;
        for (c, f) in model.casimirs.generators().iter().enumerate() {
            fam.push_independent(
                f.compose(&mu)?,
                Provenance::Pullback {
                    casimir: c,
                    t: t.clone(),
                },
            )?;
        }
    }
    Ok(fam)
}

/// Argument-translation family on `g*`: nonconstant λ-coefficients of
/// `f(x + λ a)` for every Casimir `f`. `a` must be regular.
pub fn at_family<R: Rng + ?Sized>(cas: &CasimirSet, a: &[Q], rng: &mut R) -> Result<IntegralFamily> {
    let g = cas.algebra();
    let n = g.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let rank = g.orbit_dim(a)?;
    let generic = g.generic_orbit_dim(rng)?;
    if rank < generic {
        return Err(Error::NotRegular { rank, generic });
    }
    let names = (1..=n).map(|k| format!("z{k}")).collect();
    let mut fam = IntegralFamily::new(names);
    for (c, f) in cas.generators().iter().enumerate() {
        for (&k, p) in f.translate_expand(a)?.coeffs() {
            if !p.is_constant() {
                fam.push_independent(
                    p.clone(),
                    Provenance::Shift {
                        casimir: c,
                        lambda_order: k,
                    },
                )?;
            }
        }
    }
    Ok(fam)
}

/// `F` completed by the argument-translation family pulled back along `mu_t0`.
pub fn family_g<R: Rng + ?Sized>(
    model: &GaudinModel,
    t0: &PencilDirection,
    a: &[Q],
    rng: &mut R,
) -> Result<IntegralFamily> {
    let mut fam = family_f(model)?;
    let mu = model.moment_map(t0)?;
    let shifted = at_family(model.casimirs(), a, rng)?;
    for m in shifted.members() {
        let Provenance::Shift { casimir, lambda_order } = m.provenance else {
            unreachable!("at_family only produces shift members")
        };
        let p = m.poly.compose(&mu)?;
        if p.is_constant() {
            continue;
        }
        fam.push_independent(
            p,
            Provenance::Translation {
                casimir,
                lambda_order,
                t0: t0.clone(),
            },
        )?;
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{abelian, sl2, sl3, so3};
    use crate::poisson::compatibility;
    use crate::rat::frac;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(2)
    }

    fn weights(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn repeated_weights_rejected() {
        assert!(matches!(
            GaudinSpec::new(sl2(), weights(&[0, 1, 0]), None),
            Err(Error::RepeatedWeights(_))
        ));
        assert!(GaudinModel::sl2_canonical(weights(&[2, 2])).is_err());
        assert!(GaudinSpec::new(sl2(), vec![], None).is_err());
        assert!(GaudinSpec::new(sl2(), weights(&[0, 1]), Some(vec![vec![q(1); 3]])).is_err());
    }

    #[test]
    fn single_site_pencil() {
        let spec = GaudinSpec::new(sl2(), vec![frac(3, 2)], None).unwrap();
        let pen = build_pencil(&spec).unwrap();
        let lp = Bivector::lie_poisson(&sl2());
        assert_eq!(pen.eta1, lp);
        assert_eq!(pen.eta2, lp.scale(&frac(3, 2)));
        assert_eq!(pen.exceptional(), &[PencilDirection::new(frac(3, 2), q(-1)).unwrap()]);
    }

    #[test]
    fn two_site_blocks() {
        let spec = GaudinSpec::new(sl2(), weights(&[0, 1]), None).unwrap();
        let pen = build_pencil(&spec).unwrap();
        let lp = Bivector::lie_poisson(&sl2());
        assert_eq!(pen.eta2, lp.embed(6, 3));
        assert_eq!(pen.eta1, lp.embed(6, 0).try_add(&lp.embed(6, 3)).unwrap());
        assert!(compatibility(&pen.eta1, &pen.eta2).unwrap().pass);
    }

    #[test]
    fn moment_maps() {
        let spec = GaudinSpec::new(sl2(), weights(&[0, 1]), None).unwrap();
        let model = GaudinModel::product(&spec).unwrap();
        let x = |i: usize| Poly::var(6, i);
        let mu = model.moment_map(&PencilDirection::new(q(1), q(0)).unwrap()).unwrap();
        assert_eq!(mu, (0..3).map(|k| &x(k) + &x(k + 3)).collect::<Vec<_>>());
        let mu = model.moment_map(&PencilDirection::new(q(1), q(1)).unwrap()).unwrap();
        assert_eq!(
            mu,
            (0..3).map(|k| &x(k) + &x(k + 3).scale(&frac(1, 2))).collect::<Vec<_>>()
        );
        let err = model.moment_map(&PencilDirection::new(q(1), q(-1)).unwrap());
        assert!(matches!(err, Err(Error::ExceptionalDirection { site: 1, .. })));
    }

    #[test]
    fn catalog_casimirs() {
        let n3 = |i: usize| Poly::var(3, i);
        let c = casimirs(&sl2()).unwrap();
        assert_eq!(c.generators(), &[&n3(0).pow(2) + &(&n3(1) * &n3(2)).scale(&q(4))]);
        let c = casimirs(&so3()).unwrap();
        assert_eq!(
            c.generators()[0].to_text(&crate::polyring::default_names(3)),
            "x0^2 + x1^2 + x2^2"
        );
        let c = casimirs(&sl3()).unwrap();
        let degs: Vec<u32> = c.generators().iter().map(|p| p.degree().unwrap()).collect();
        assert_eq!(degs, vec![2, 3]);
        let c = casimirs(&liealg::gl2()).unwrap();
        assert_eq!(c.generators()[0].degree(), Some(1));
        let c = casimirs(&abelian(2)).unwrap();
        assert_eq!(c.generators().len(), 2);
    }

    #[test]
    fn sl2_trace_form_matches_catalog() {
        let t = trace_invariants("sl2", 3, &[2]).unwrap();
        assert_eq!(t[0], casimirs(&sl2()).unwrap().generators()[0]);
    }

    #[test]
    fn non_casimir_rejected_with_coordinate() {
        let bad = Poly::var(3, 1);
        let err = CasimirSet::certify(&sl2(), vec![bad]).unwrap_err();
        assert!(matches!(err, Error::NotCasimir { index: 0, .. }));
    }

    #[test]
    fn canonical_first_order_pole_coefficients() {
        // N = 2, weights (0, 1): F_1 = (p2 q1 - p1 q2)^2 / (a2 - a1).
        let model = GaudinModel::sl2_canonical(weights(&[0, 1])).unwrap();
        let v = |i: usize| Poly::var(4, i);
        let cross = &(&v(2) * &v(1)) - &(&v(0) * &v(3));
        let coeffs = model.pole_coefficients().unwrap();
        let first: Vec<&Member> = coeffs
            .iter()
            .filter(|m| matches!(m.provenance, Provenance::Pole { order: -1, .. }))
            .collect();
        assert_eq!(first.len(), 2);
        assert_eq!(first[0].poly, cross.pow(2));
        assert_eq!(first[1].poly, cross.pow(2).neg());
        // The double pole vanishes identically for this model.
        assert!(coeffs
            .iter()
            .all(|m| !matches!(m.provenance, Provenance::Pole { order: -2, .. })));
    }

    #[test]
    fn single_site_family_is_site_casimir() {
        let spec = GaudinSpec::new(sl2(), weights(&[4]), None).unwrap();
        let model = GaudinModel::product(&spec).unwrap();
        let f = family_f(&model).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.members()[0].poly, casimirs(&sl2()).unwrap().generators()[0]);
        assert_eq!(
            f.members()[0].provenance,
            Provenance::Pole {
                casimir: 0,
                pole: "4".into(),
                order: -2
            }
        );
    }

    #[test]
    fn sampled_generation_spans_the_same_space() {
        for (g, nsites) in [(sl2(), 3usize), (so3(), 2), (sl3(), 2)] {
            let spec = GaudinSpec::with_default_weights(g, nsites).unwrap();
            let model = GaudinModel::product(&spec).unwrap();
            let fam = family_f(&model).unwrap();
            let ts: Vec<PencilDirection> = (0..(3 * nsites + 4))
                .map(|i| PencilDirection::affine(frac(2 * i as i64 + 1, 3) + q(10)))
                .chain([PencilDirection::new(q(1), q(0)).unwrap()])
                .collect();
            let sampled = family_f_sampled(&model, &ts).unwrap();
            assert_eq!(fam.span_dim(), sampled.span_dim());
            assert!(sampled.polys().all(|p| fam.spans(p)));
        }
    }

    #[test]
    fn at_family_examples() {
        let mut r = rng();
        let z0 = vec![q(2), q(-3), q(5)];
        let fam = at_family(&casimirs(&sl2()).unwrap(), &z0, &mut r).unwrap();
        let f = casimirs(&sl2()).unwrap().generators()[0].clone();
        let g = Poly::linear(&[z0[0].clone(), q(2) * &z0[2], q(2) * &z0[1]], Q::zero());
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.members()[0].poly, f);
        assert_eq!(fam.members()[1].poly.scalar_multiple_of(&g), Some(q(2)));

        let fam = at_family(&casimirs(&so3()).unwrap(), &[q(1), q(0), q(0)], &mut r).unwrap();
        assert_eq!(fam.members()[1].poly.scalar_multiple_of(&Poly::var(3, 0)), Some(q(2)));

        let fam = at_family(&casimirs(&abelian(3)).unwrap(), &[q(1), q(2), q(3)], &mut r).unwrap();
        assert_eq!(
            fam.polys().cloned().collect::<Vec<_>>(),
            (0..3).map(|i| Poly::var(3, i)).collect::<Vec<_>>()
        );

        let err = at_family(&casimirs(&sl2()).unwrap(), &[q(0), q(0), q(0)], &mut r);
        assert!(matches!(err, Err(Error::NotRegular { rank: 0, generic: 2 })));
    }

    #[test]
    fn family_g_on_two_sl2_sites() {
        let spec = GaudinSpec::with_default_weights(sl2(), 2).unwrap();
        let model = GaudinModel::product(&spec).unwrap();
        let t0 = PencilDirection::new(q(1), q(0)).unwrap();
        let fam = family_g(&model, &t0, &[q(1), q(2), q(3)], &mut rng()).unwrap();
        // Two site Casimirs, one pole residue, one translation member.
        assert_eq!(fam.len(), 4);
        let kinds: Vec<bool> = fam
            .members()
            .iter()
            .map(|m| matches!(m.provenance, Provenance::Translation { .. }))
            .collect();
        assert_eq!(kinds, vec![false, false, false, true]);
    }

    #[test]
    fn family_json_round_trip() {
        let model = GaudinModel::sl2_canonical(weights(&[0, 1, 2])).unwrap();
        let fam = family_f(&model).unwrap();
        let back = IntegralFamily::from_json(&fam.to_json()).unwrap();
        assert_eq!(back.members(), fam.members());
    }

    #[test]
    fn primitive_normalization() {
        let p = Poly::linear(&[frac(-2, 3), frac(4, 9)], Q::zero());
        assert_eq!(primitive(&p), Poly::linear(&[q(3), q(-2)], Q::zero()));
    }
}
