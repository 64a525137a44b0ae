//! Floating-point RK4 integration of hamiltonian fields and drift monitoring
//! of first integrals.

use crate::error::{Error, Result};
use crate::gaudin::IntegralFamily;
use crate::liealg::Element;
use crate::poisson::Bivector;
use crate::polyring::Poly;
use crate::rat::{random_vec, to_f64, Q};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;
use std::io::Write;

/// A polynomial with `f64` coefficients, evaluated by direct monomial products.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl FloatPoly {
    pub fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|(e, c)| {
                let factors = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (i, k as i32))
                    .collect();
                (factors, to_f64(c))
            })
            .collect();
        Self {
            nvars: p.nvars(),
            terms,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(factors, c)| factors.iter().fold(*c, |acc, &(i, k)| acc * x[i].powi(k)))
            .sum()
    }
}

/// `x' = (sum_j P^{ij} d_j H)_i` compiled for float evaluation.
#[derive(Debug, Clone)]
pub struct FloatField {
    components: Vec<FloatPoly>,
}

impl FloatField {
    pub fn new(p: &Bivector, h: &Poly) -> Result<Self> {
        Ok(Self {
            components: p.hamiltonian_field(h)?.iter().map(FloatPoly::new).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    fn rk4_step(&self, x: &[f64], dt: f64) -> Vec<f64> {
        let shifted = |k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
        let k1 = self.eval(x);
        let k2 = self.eval(&shifted(&k1, dt / 2.0));
        let k3 = self.eval(&shifted(&k2, dt / 2.0));
        let k4 = self.eval(&shifted(&k3, dt));
        (0..x.len())
            .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub hamiltonian: Poly,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }
}

/// Classical RK4 for the hamiltonian field of `h`, recording every state.
pub fn integrate(p: &Bivector, h: &Poly, x0: &[f64], dt: f64, steps: usize) -> Result<Trajectory> {
    integrate_strided(p, h, x0, dt, steps, 1)
}

/// As [`integrate`], recording the initial state, every `stride`-th state and
/// the final one.
pub fn integrate_strided(
    p: &Bivector,
    h: &Poly,
    x0: &[f64],
    dt: f64,
    steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::BadIntegration(format!("dt must be positive, got {dt}")));
    }
    if steps == 0 || stride == 0 {
        return Err(Error::BadIntegration("steps and stride must be at least 1".into()));
    }
    if x0.len() != p.dim() || h.nvars() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x0.len().min(h.nvars()),
        });
    }
    let field = FloatField::new(p, h)?;
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    for step in 1..=steps {
        x = field.rk4_step(&x, dt);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        if step % stride == 0 || step == steps {
            times.push(step as f64 * dt);
            states.push(x.clone());
        }
    }
    Ok(Trajectory {
        times,
        states,
        hamiltonian: h.clone(),
    })
}

/// Random start on `(sl2*)^N` with every site in the open cone
/// `z1^2 + 4 z2 z3 < 0, z3 > 0` and coordinates in `[-1, 1]`. The cone is
/// convex and the total moment is conserved, so Gaudin flows from here stay
/// bounded.
pub fn elliptic_sl2_start<R: Rng + ?Sized>(sites: usize, rng: &mut R) -> Vec<Q> {
    let mut out = Vec::new();
    while out.len() < 3 * sites {
        let z: Element = random_vec(rng, 3, 10);
        let c = &z[0] * &z[0] + Q::from_integer(4.into()) * &z[1] * &z[2];
        if c < Q::zero() && z[2] > Q::zero() && z.iter().all(|v| v.abs() <= Q::one()) {
            out.extend(z);
        }
    }
    out
}

pub fn to_floats(x: &[Q]) -> Vec<f64> {
    x.iter().map(to_f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberDrift {
    pub index: usize,
    pub member: String,
    pub initial: f64,
    pub max_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub members: Vec<MemberDrift>,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.members.iter().map(|m| m.max_drift).fold(0.0, f64::max)
    }
}

/// `max_t |f(x(t)) - f(x0)| / max(1, |f(x0)|)` for every member.
pub fn conservation_report(traj: &Trajectory, fam: &IntegralFamily) -> Result<ConservationReport> {
    let dim = traj.states[0].len();
    if fam.ambient() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: fam.ambient(),
        });
    }
    let members = fam
        .polys()
        .enumerate()
        .map(|(index, p)| {
            let f = FloatPoly::new(p);
            let initial = f.eval(&traj.states[0]);
            let scale = initial.abs().max(1.0);
            let max_drift = traj
                .states
                .iter()
                .map(|x| (f.eval(x) - initial).abs() / scale)
                .fold(0.0, f64::max);
            MemberDrift {
                index,
                member: p.to_text(fam.names()),
                initial,
                max_drift,
            }
        })
        .collect();
    Ok(ConservationReport { members })
}

/// CSV rows: time, state components, then each member's value.
pub fn write_csv<W: Write>(traj: &Trajectory, fam: &IntegralFamily, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time".to_string()];
    header.extend(fam.names().iter().cloned());
    header.extend((0..fam.len()).map(|i| format!("f{i}")));
    w.write_record(&header)?;
    let compiled: Vec<FloatPoly> = fam.polys().map(FloatPoly::new).collect();
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![t.to_string()];
        row.extend(x.iter().map(f64::to_string));
        row.extend(compiled.iter().map(|f| f.eval(x).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
