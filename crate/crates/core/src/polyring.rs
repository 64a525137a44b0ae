//! Sparse multivariate polynomials with exact rational coefficients, plus
//! one-parameter expansions (shifts `f(x + λa)` and Laurent expansions at the
//! poles of a pencil of moment maps).

use crate::error::{Error, Result};
use crate::rat::{fmt_q, parse_q, to_f64, Q};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub type Exponent = Vec<u32>;

/// A polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self.to_text(&default_names(self.nvars)))
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Graded lexicographic comparison (higher total degree first).
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars}");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exp: Exponent, c: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// Affine linear form `c0 + sum_i coeffs[i] x_i`.
    pub fn linear(coeffs: &[Q], c0: Q) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, c0);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Q)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    fn add_term(&mut self, exp: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut acc: HashMap<Exponent, Q> = HashMap::with_capacity(self.len() * other.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let v = acc.entry(e).or_insert_with(Q::zero);
                *v = &*v + ca * cb;
            }
        }
        Ok(Poly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), -x.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Exact partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Q::from_integer(e[i].into()));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i).expect("in range")).collect()
    }

    pub fn eval(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation with coefficients converted on the fly.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(to_f64(c), |t, (&k, &x)| if k == 0 { t } else { t * x.powi(k as i32) })
            })
            .sum()
    }

    /// Substitutes `x_i := subs[i]`; every substitute must share one variable count.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        let target = match subs.first() {
            Some(s) => s.nvars,
            None => 0,
        };
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(Error::DimensionMismatch {
                expected: target,
                got: bad.nvars,
            });
        }
        let mut powers: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = powers.entry((i, k)).or_insert_with(|| subs[i].pow(k));
                t = &t * &*p;
            }
            for (te, tc) in t.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }

    /// Pullback along the affine map `x_old = matrix * x_new + offset`, where
    /// `matrix` has one row per old variable and one column per new variable.
    pub fn substitute_linear(&self, matrix: &[Vec<Q>], offset: &[Q]) -> Result<Poly> {
        if matrix.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: matrix.len(),
            });
        }
        if offset.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: offset.len(),
            });
        }
        let m = matrix.first().map_or(0, Vec::len);
        if let Some(row) = matrix.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: row.len(),
            });
        }
        let subs: Vec<Poly> = matrix
            .iter()
            .zip(offset)
            .map(|(row, c)| Poly::linear(row, c.clone()))
            .collect();
        if self.nvars == 0 {
            return Ok(Poly::constant(m, self.constant_term()));
        }
        self.compose(&subs)
    }

    /// Re-embeds into `total` variables, shifting variable `i` to `offset + i`.
    pub fn embed(&self, total: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= total);
        let mut out = Poly::zero(total);
        for (e, c) in &self.terms {
            let mut ne = vec![0; total];
            ne[offset..offset + self.nvars].copy_from_slice(e);
            out.add_term(ne, c.clone());
        }
        out
    }

    /// `f(x + λ a)` as a polynomial in λ with polynomial coefficients.
    pub fn translate_expand(&self, direction: &[Q]) -> Result<ParamPoly> {
        if direction.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: direction.len(),
            });
        }
        let n = self.nvars;
        let lam = n;
        let subs: Vec<Poly> = (0..n)
            .map(|i| {
                let mut e = vec![0; n + 1];
                e[lam] = 1;
                let mut x = Poly::var(n + 1, i);
                x.add_term(e, direction[i].clone());
                x
            })
            .collect();
        let shifted = if n == 0 {
            Poly::constant(1, self.constant_term())
        } else {
            self.compose(&subs)?
        };
        let mut out = ParamPoly::zero(n);
        for (e, c) in shifted.terms {
            let k = e[lam] as i64;
            let mut base = e;
            base.truncate(n);
            out.add_term(k, base, c);
        }
        Ok(out)
    }

    /// Graded-lex ordered terms, highest first.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_cmp(a.0, b.0));
        v
    }

    /// Canonical text form: graded-lex terms, `p/q` coefficients, named variables.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if factors.is_empty() {
                s.push_str(&fmt_q(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_q(&a));
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }

    /// Parses the canonical text form (whitespace-insensitive; any term order).
    pub fn parse(text: &str, names: &[String]) -> Result<Poly> {
        let n = names.len();
        let err = |reason: &str| Error::BadPolynomial {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut out = Poly::zero(n);
        // Split into signed terms, keeping '-' inside coefficients like "-1/2" attached.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && (i > 0) && !cur.ends_with('^') {
                if cur.is_empty() {
                    return Err(err("dangling sign"));
                }
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err("dangling sign"));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let mut coef = Q::one();
            let mut exp = vec![0u32; n];
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                let first = factor.chars().next().unwrap();
                if first.is_ascii_digit() {
                    coef *= parse_q(factor).map_err(|_| err("bad coefficient"))?;
                } else {
                    let (name, power) = match factor.split_once('^') {
                        Some((v, p)) => (v, p.parse::<u32>().map_err(|_| err("bad exponent"))?),
                        None => (factor, 1),
                    };
                    let &idx = lookup
                        .get(name)
                        .ok_or_else(|| err(&format!("unknown variable `{name}`")))?;
                    exp[idx] += power;
                }
            }
            out.add_term(exp, if neg { -coef } else { coef });
        }
        Ok(out)
    }

    /// Sparse coefficient vector keyed by exponent, for exact linear-dependence tests.
    pub fn coefficient_vector(&self) -> BTreeMap<Exponent, Q> {
        self.terms.clone()
    }

    /// `Some(c)` with `self = c * other`, when such a nonzero rational exists.
    pub fn scalar_multiple_of(&self, other: &Poly) -> Option<Q> {
        if self.nvars != other.nvars || self.len() != other.len() || other.is_zero() {
            return None;
        }
        let (e0, c0) = other.terms.iter().next()?;
        let ratio = self.terms.get(e0)? / c0;
        if other.scale(&ratio) == *self {
            Some(ratio)
        } else {
            None
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$f(rhs).expect("variable-count mismatch")
            }
        }
        impl std::ops::$tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$f(&rhs).expect("variable-count mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

/// Polynomial-coefficient series in one formal parameter, with a finite
/// Laurent part allowed (keys may be negative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    nvars: usize,
    coeffs: BTreeMap<i64, Poly>,
}

impl ParamPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Poly> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Poly {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn min_order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn add_term(&mut self, k: i64, exp: Exponent, c: Q) {
        let nv = self.nvars;
        let p = self.coeffs.entry(k).or_insert_with(|| Poly::zero(nv));
        p.add_term(exp, c);
        if p.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    fn add_poly(&mut self, k: i64, p: &Poly, scale: &Q) {
        if scale.is_zero() {
            return;
        }
        for (e, c) in &p.terms {
            self.add_term(k, e.clone(), c * scale);
        }
    }

    /// Sums `sum_k coeff_k * value^k`; `value` must be nonzero if negative orders exist.
    pub fn eval_param(&self, value: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (&k, p) in &self.coeffs {
            let s = if k >= 0 {
                num_traits::pow(value.clone(), k as usize)
            } else {
                Q::one() / num_traits::pow(value.clone(), (-k) as usize)
            };
            out = &out + &p.scale(&s);
        }
        out
    }
}

/// The composition `f(sum_j u_j m_j)` with `u_j = 1/(r - a_j)`, stored as one
/// polynomial in the ambient variables followed by one variable per pole.
#[derive(Debug, Clone)]
pub struct PoleComposition {
    ambient: usize,
    poles: Vec<Q>,
    poly: Poly,
}

impl PoleComposition {
    /// `f` has one variable per moment component; `site_moments[j]` lists the
    /// components attached to pole `poles[j]`, all polynomials in `ambient` variables.
    pub fn new(f: &Poly, site_moments: &[Vec<Poly>], poles: &[Q], ambient: usize) -> Result<Self> {
        if site_moments.len() != poles.len() {
            return Err(Error::DimensionMismatch {
                expected: poles.len(),
                got: site_moments.len(),
            });
        }
        let n = f.nvars();
        let total = ambient + poles.len();
        let mut z: Vec<Poly> = vec![Poly::zero(total); n];
        for (j, moments) in site_moments.iter().enumerate() {
            if moments.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: moments.len(),
                });
            }
            let u = Poly::var(total, ambient + j);
            for (k, m) in moments.iter().enumerate() {
                if m.nvars() != ambient {
                    return Err(Error::DimensionMismatch {
                        expected: ambient,
                        got: m.nvars(),
                    });
                }
                z[k] = &z[k] + &(&m.embed(total, 0) * &u);
            }
        }
        let poly = if n == 0 {
            Poly::constant(total, f.constant_term())
        } else {
            f.compose(&z)?
        };
        Ok(Self {
            ambient,
            poles: poles.to_vec(),
            poly,
        })
    }

    pub fn poles(&self) -> &[Q] {
        &self.poles
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Highest power of `1/(r - a_j)` present.
    pub fn pole_order(&self, j: usize) -> u32 {
        self.poly.degree_in(self.ambient + j)
    }

    fn pole_index(&self, pole: &Q) -> Result<usize> {
        self.poles
            .iter()
            .position(|a| a == pole)
            .ok_or_else(|| Error::UnknownPole(fmt_q(pole)))
    }

    /// Terms grouped by their exponent in the pole variables.
    fn groups(&self) -> BTreeMap<Exponent, Poly> {
        let mut g: BTreeMap<Exponent, Poly> = BTreeMap::new();
        for (e, c) in &self.poly.terms {
            let key = e[self.ambient..].to_vec();
            let base = e[..self.ambient].to_vec();
            g.entry(key)
                .or_insert_with(|| Poly::zero(self.ambient))
                .add_term(base, c.clone());
        }
        g
    }

    /// The value at a rational `r` off the pole set.
    pub fn eval_at(&self, r: &Q) -> Result<Poly> {
        let u: Vec<Q> = self
            .poles
            .iter()
            .map(|a| {
                let d = r - a;
                if d.is_zero() {
                    Err(Error::UnknownPole(fmt_q(r)))
                } else {
                    Ok(Q::one() / d)
                }
            })
            .collect::<Result<_>>()?;
        let mut out = Poly::zero(self.ambient);
        for (key, p) in self.groups() {
            let w = key
                .iter()
                .zip(&u)
                .fold(Q::one(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize));
            out = &out + &p.scale(&w);
        }
        Ok(out)
    }

    /// The limit as `r -> infinity` (every `u_j -> 0`).
    pub fn value_at_infinity(&self) -> Poly {
        self.groups()
            .remove(&vec![0; self.poles.len()])
            .unwrap_or_else(|| Poly::zero(self.ambient))
    }

    /// Laurent coefficients in `s = r - pole`, from the lowest order up to
    /// and including order `through`.
    pub fn pole_expand(&self, pole: &Q, through: i64) -> Result<ParamPoly> {
        let j = self.pole_index(pole)?;
        let mut out = ParamPoly::zero(self.ambient);
        let mut cache: HashMap<(usize, u32, usize), Vec<Q>> = HashMap::new();
        for (key, p) in self.groups() {
            let lead = -(key[j] as i64);
            if lead > through {
                continue;
            }
            let len = (through - lead + 1) as usize;
            let mut series = vec![Q::zero(); len];
            series[0] = Q::one();
            for (k, &e) in key.iter().enumerate() {
                if k == j || e == 0 {
                    continue;
                }
                let c = &self.poles[j] - &self.poles[k];
                let factor = cache
                    .entry((k, e, len))
                    .or_insert_with(|| inverse_power_series(&c, e, len));
                series = truncated_product(&series, factor, len);
            }
            for (n, w) in series.iter().enumerate() {
                out.add_poly(lead + n as i64, &p, w);
            }
        }
        Ok(out)
    }

    /// Principal part (strictly negative orders) at `pole`.
    pub fn principal_part(&self, pole: &Q) -> Result<ParamPoly> {
        self.pole_expand(pole, -1)
    }

    /// Partial-fraction resummation: value at infinity plus every principal part.
    pub fn resum(&self, r: &Q) -> Result<Poly> {
        let mut out = self.value_at_infinity();
        for a in &self.poles {
            let s = r - a;
            if s.is_zero() {
                return Err(Error::UnknownPole(fmt_q(r)));
            }
            out = &out + &self.principal_part(a)?.eval_param(&s);
        }
        Ok(out)
    }
}

/// Coefficients of `(c + s)^(-e)` in powers of `s`, `len` terms.
fn inverse_power_series(c: &Q, e: u32, len: usize) -> Vec<Q> {
    // (c + s)^(-e) = c^(-e) sum_n binom(e+n-1, n) (-s/c)^n
    let inv_c = Q::one() / c;
    let mut out = Vec::with_capacity(len);
    let mut term = num_traits::pow(inv_c.clone(), e as usize);
    for n in 0..len {
        out.push(term.clone());
        let n = n as i64;
        term = -term * &inv_c * Q::new((e as i64 + n).into(), (n + 1).into());
    }
    out
}

fn truncated_product(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (k, y) in b.iter().enumerate().take(len - i) {
            out[i + k] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, q};
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn difference_of_squares() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let expect = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        assert_eq!(&a * &b, expect);
        assert!((&a + &a.neg()).is_zero());
        let s = (&x(2, 0) * &x(2, 1)).scale(&frac(3, 2));
        assert_eq!(s.coeff(&[1, 1]), frac(3, 2));
        assert!(x(2, 0).try_add(&x(3, 0)).is_err());
    }

    #[test]
    fn partials() {
        let p = &x(2, 0).pow(2) * &x(2, 1);
        assert_eq!(p.partial(0).unwrap(), (&x(2, 0) * &x(2, 1)).scale(&q(2)));
        assert!(x(2, 0).pow(2).partial(1).unwrap().is_zero());
        assert!(p.partial(2).is_err());
    }

    #[test]
    fn evaluation() {
        let p = &x(2, 0) + &x(2, 1);
        assert_eq!(p.eval(&[q(1), q(2)]).unwrap(), q(3));
        assert_eq!(Poly::constant(2, frac(7, 3)).eval(&[q(5), q(-1)]).unwrap(), frac(7, 3));
        assert!(p.eval(&[q(1)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let names: Vec<String> = ["z1", "z2", "z3"].iter().map(|s| s.to_string()).collect();
        let f = Poly::parse("z1^2 + 4*z2*z3", &names).unwrap();
        assert_eq!(f.to_text(&names), "z1^2 + 4*z2*z3");
        let g = Poly::parse("-1/2*z2^2 + 3 - z1", &names).unwrap();
        assert_eq!(g.to_text(&names), "-1/2*z2^2 - z1 + 3");
        assert_eq!(Poly::zero(3).to_text(&names), "0");
        assert!(Poly::parse("w^2", &names).is_err());
        assert!(Poly::parse("z1 +", &names).is_err());
    }

    #[test]
    fn substitute_identity_and_zero() {
        let f = &(&x(2, 0).pow(2) * &x(2, 1)) + &Poly::constant(2, q(5));
        let id = crate::linalg::identity(2);
        assert_eq!(f.substitute_linear(&id, &[q(0), q(0)]).unwrap(), f);
        let zero = vec![vec![q(0); 3]; 2];
        assert_eq!(
            f.substitute_linear(&zero, &[q(0), q(0)]).unwrap(),
            Poly::constant(3, q(5))
        );
        assert!(f.substitute_linear(&zero, &[q(0)]).is_err());
    }

    #[test]
    fn casimir_pullback_along_sum() {
        // z_k = x_k^(1) + x_k^(2), six ambient variables.
        let f = &x(3, 0).pow(2) + &(&x(3, 1) * &x(3, 2)).scale(&q(4));
        let mut m = vec![vec![q(0); 6]; 3];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = q(1);
            row[k + 3] = q(1);
        }
        let got = f.substitute_linear(&m, &[q(0), q(0), q(0)]).unwrap();
        let s = |k: usize| &x(6, k) + &x(6, k + 3);
        let expect = &s(0).pow(2) + &(&s(1) * &s(2)).scale(&q(4));
        assert_eq!(got, expect);
    }

    #[test]
    fn translate_expand_sl2_casimir() {
        let f = &x(3, 0).pow(2) + &(&x(3, 1) * &x(3, 2)).scale(&q(4));
        let a = vec![q(2), q(-1), q(3)];
        let tp = f.translate_expand(&a).unwrap();
        assert_eq!(tp.coeff(0), f);
        // 2 g with g = z1 a1 + 2 z2 a3 + 2 z3 a2
        let g = Poly::linear(&[a[0].clone(), q(2) * &a[2], q(2) * &a[1]], q(0));
        assert_eq!(tp.coeff(1), g.scale(&q(2)));
        assert_eq!(tp.coeff(2), Poly::constant(3, f.eval(&a).unwrap()));
        assert_eq!(tp.max_order(), Some(2));

        let zero = f.translate_expand(&[q(0), q(0), q(0)]).unwrap();
        assert_eq!(zero.coeffs().len(), 1);
        let lin = Poly::linear(&[q(1), q(2), q(3)], q(0));
        assert_eq!(
            lin.translate_expand(&a).unwrap().coeff(1),
            Poly::constant(3, lin.eval(&a).unwrap())
        );
    }

    #[test]
    fn single_site_pole_has_only_top_order() {
        // N = 1: f(m/(r - a)) = f(m)/(r - a)^2 for quadratic homogeneous f.
        let f = &x(3, 0).pow(2) + &(&x(3, 1) * &x(3, 2)).scale(&q(4));
        let m: Vec<Poly> = (0..3).map(|k| x(3, k)).collect();
        let pc = PoleComposition::new(&f, &[m], &[q(5)], 3).unwrap();
        let e = pc.pole_expand(&q(5), 3).unwrap();
        assert_eq!(e.coeffs().keys().copied().collect::<Vec<_>>(), vec![-2]);
        assert_eq!(e.coeff(-2), f);
        assert!(pc.pole_expand(&q(4), 0).is_err());
    }

    #[test]
    fn constant_casimir_expansion() {
        let f = Poly::constant(3, q(7));
        let m: Vec<Poly> = (0..3).map(|k| x(3, k)).collect();
        let pc = PoleComposition::new(&f, &[m.clone(), m], &[q(0), q(1)], 3).unwrap();
        let e = pc.pole_expand(&q(0), 2).unwrap();
        assert_eq!(e.coeffs().len(), 1);
        assert_eq!(e.coeff(0), Poly::constant(3, q(7)));
    }

    #[test]
    fn inverse_series_matches_direct_division() {
        // (c + s)^(-2) at c = 3, evaluated at s = 1/10 through many terms.
        let c = q(3);
        let s = frac(1, 10);
        let series = inverse_power_series(&c, 2, 30);
        let approx = series
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (n, a)| acc + a * num_traits::pow(s.clone(), n));
        let exact = Q::one() / num_traits::pow(&c + &s, 2);
        let err = to_f64(&(approx - exact)).abs();
        assert!(err < 1e-25, "{err}");
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, n), -5i64..=5, 1i64..=4), 0..6)
            .prop_map(move |ts| Poly::from_terms(n, ts.into_iter().map(|(e, a, b)| (e, frac(a, b)))).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn leibniz(a in arb_poly(3), b in arb_poly(3), i in 0usize..3) {
            let lhs = (&a * &b).partial(i).unwrap();
            let rhs = &(&a * &b.partial(i).unwrap()) + &(&b * &a.partial(i).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn eval_is_a_ring_map(a in arb_poly(3), b in arb_poly(3), p in proptest::collection::vec(-4i64..=4, 3)) {
            let pt: Vec<Q> = p.into_iter().map(q).collect();
            prop_assert_eq!((&a * &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() * b.eval(&pt).unwrap());
            prop_assert_eq!((&a + &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() + b.eval(&pt).unwrap());
        }

        #[test]
        fn translate_then_eval(a in arb_poly(3), p in proptest::collection::vec(-4i64..=4, 3),
                               d in proptest::collection::vec(-4i64..=4, 3), l in -5i64..=5) {
            let pt: Vec<Q> = p.into_iter().map(q).collect();
            let dir: Vec<Q> = d.into_iter().map(q).collect();
            let lam = frac(l, 3);
            let tp = a.translate_expand(&dir).unwrap();
            let shifted: Vec<Q> = pt.iter().zip(&dir).map(|(x, y)| x + &lam * y).collect();
            prop_assert_eq!(tp.eval_param(&lam).eval(&pt).unwrap(), a.eval(&shifted).unwrap());
        }

        #[test]
        fn text_round_trips(a in arb_poly(3)) {
            let names = default_names(3);
            prop_assert_eq!(Poly::parse(&a.to_text(&names), &names).unwrap(), a);
        }

        #[test]
        fn resummation_reproduces_composition(f in arb_poly(2), r in -20i64..20) {
            // Two sites with linear and quadratic moments on two ambient variables.
            let m1 = vec![x(2, 0), &x(2, 0) * &x(2, 1)];
            let m2 = vec![x(2, 1).pow(2), Poly::constant(2, q(1))];
            let poles = [q(0), frac(3, 2)];
            let pc = PoleComposition::new(&f, &[m1, m2], &poles, 2).unwrap();
            let r0 = frac(2 * r + 1, 4);
            prop_assert_eq!(pc.resum(&r0).unwrap(), pc.eval_at(&r0).unwrap());
        }
    }
}
