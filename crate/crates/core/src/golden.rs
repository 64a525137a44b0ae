//! Closed-form checks for the `sl2` model on `R^{2N}`: the moment map
//! pencil, the first-order pole generators, their single relation and the
//! shift member of the completed family.

use crate::error::Result;
use crate::gaudin::{family_f, family_g, GaudinModel, Provenance};
use crate::poisson::PencilDirection;
use crate::polyring::Poly;
use crate::rat::{fmt_q, frac, q, Q};
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenReport {
    pub weights: Vec<String>,
    pub shift: Vec<String>,
    /// `mu_(1,0)` components.
    pub moment_map: Vec<String>,
    /// `F_j = sum_{k != j} (p_k q_j - p_j q_k)^2 / (a_k - a_j)`.
    pub first_order: Vec<String>,
    pub shift_member: String,
    pub family_g: Vec<String>,
    pub checks: Vec<GoldenCheck>,
    pub pass: bool,
}

struct Canonical {
    m: usize,
}

impl Canonical {
    fn p(&self, j: usize) -> Poly {
        Poly::var(self.m, 2 * j)
    }

    fn q(&self, j: usize) -> Poly {
        Poly::var(self.m, 2 * j + 1)
    }

    fn sum<F: Fn(usize) -> Poly>(&self, f: F) -> Poly {
        (0..self.m / 2).fold(Poly::zero(self.m), |acc, j| &acc + &f(j))
    }
}

/// The moment map at `t`, written out by hand.
fn explicit_moment_map(c: &Canonical, weights: &[Q], t: &PencilDirection) -> Vec<Poly> {
    let w = |j: usize| Q::one() / (&t.t1 + &weights[j] * &t.t2);
    vec![
        c.sum(|j| (&c.p(j) * &c.q(j)).scale(&-w(j))),
        c.sum(|j| c.q(j).pow(2).scale(&(frac(-1, 2) * w(j)))),
        c.sum(|j| c.p(j).pow(2).scale(&(frac(1, 2) * w(j)))),
    ]
}

fn explicit_first_order(c: &Canonical, weights: &[Q], j: usize) -> Poly {
    c.sum(|k| {
        if k == j {
            return Poly::zero(c.m);
        }
        let cross = &(&c.p(k) * &c.q(j)) - &(&c.p(j) * &c.q(k));
        cross.pow(2).scale(&(Q::one() / (&weights[k] - &weights[j])))
    })
}

/// Maps the shift `z0` of `z0_1 sum p q + z0_2 sum p^2 + z0_3 sum q^2` onto the translation direction
/// `a` that produces it under `mu_(1,0)`.
pub fn shift_direction(z0: &[Q]) -> Vec<Q> {
    vec![-z0[0].clone(), z0[1].clone(), -z0[2].clone()]
}

/// Runs every check for the given weights, shift `z0` and sample directions.
pub fn sl2_example<R: Rng + ?Sized>(
    weights: &[Q],
    z0: &[Q],
    ts: &[PencilDirection],
    rng: &mut R,
) -> Result<GoldenReport> {
    let model = GaudinModel::sl2_canonical(weights.to_vec())?;
    let names = model.names();
    let c = Canonical { m: model.ambient() };
    let n = weights.len();
    let mut checks = Vec::new();
    let mut check = |name: String, pass: bool, detail: Option<String>| checks.push(GoldenCheck { name, pass, detail });

    let unit = PencilDirection::new(q(1), q(0))?;
    for t in std::iter::once(&unit).chain(ts) {
        let got = model.moment_map(t)?;
        let want = explicit_moment_map(&c, weights, t);
        check(format!("moment map at {}", t.label()), got == want, None);
    }
    for (j, m) in model.site_moments().iter().enumerate() {
        let want = explicit_moment_map(&c, &vec![Q::zero(); n], &unit);
        let site: Vec<Poly> = want
            .iter()
            .map(|p| {
                let mut s = Poly::zero(c.m);
                for (e, v) in p.terms() {
                    if e.iter().enumerate().all(|(i, &k)| k == 0 || i / 2 == j) {
                        s = &s + &Poly::monomial(e.clone(), v.clone());
                    }
                }
                s
            })
            .collect();
        check(format!("site moment {}", j + 1), m == &site, None);
    }

    let mut first = Vec::new();
    let coefficients = model.pole_coefficients()?;
    for (j, a) in weights.iter().enumerate() {
        let want = explicit_first_order(&c, weights, j);
        let got = coefficients
            .iter()
            .find(|m| matches!(&m.provenance, Provenance::Pole { pole, order: -1, .. } if *pole == fmt_q(a)))
            .map(|m| m.poly.clone())
            .unwrap_or_else(|| Poly::zero(c.m));
        check(
            format!("first-order generator F_{}", j + 1),
            got == want,
            Some(want.to_text(names)),
        );
        first.push(want);
    }
    let total = first.iter().fold(Poly::zero(c.m), |acc, f| &acc + f);
    check(
        "sum of first-order generators".into(),
        total.is_zero(),
        Some(total.to_text(names)),
    );
    let double = coefficients
        .iter()
        .any(|m| matches!(m.provenance, Provenance::Pole { order: -2, .. }));
    check("no double-pole coefficients".into(), !double, None);
    let fam_f = family_f(&model)?;
    check(
        format!("family F spans {} functions", n - 1),
        fam_f.span_dim() == n - 1,
        Some(fam_f.span_dim().to_string()),
    );

    let shift_member = c.sum(|j| {
        let pq = (&c.p(j) * &c.q(j)).scale(&z0[0]);
        let pp = c.p(j).pow(2).scale(&z0[1]);
        let qq = c.q(j).pow(2).scale(&z0[2]);
        &(&pq + &pp) + &qq
    });
    let g = family_g(&model, &unit, &shift_direction(z0), rng)?;
    let translated: Vec<&Poly> = g
        .members()
        .iter()
        .filter(|m| matches!(m.provenance, Provenance::Translation { .. }))
        .map(|m| &m.poly)
        .collect();
    let factor = translated.first().and_then(|p| p.scalar_multiple_of(&shift_member));
    check(
        "shift member of the completed family".into(),
        translated.len() == 1 && factor == Some(q(2)),
        factor.as_ref().map(fmt_q),
    );
    check(
        format!("completed family has {n} members"),
        g.len() == n,
        Some(g.len().to_string()),
    );

    let pass = checks.iter().all(|c| c.pass);
    Ok(GoldenReport {
        weights: weights.iter().map(fmt_q).collect(),
        shift: z0.iter().map(fmt_q).collect(),
        moment_map: model.moment_map(&unit)?.iter().map(|p| p.to_text(names)).collect(),
        first_order: first.iter().map(|p| p.to_text(names)).collect(),
        shift_member: shift_member.to_text(names),
        family_g: g.polys().map(|p| p.to_text(names)).collect(),
        checks,
        pass,
    })
}
