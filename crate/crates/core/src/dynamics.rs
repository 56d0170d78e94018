//! The interval maps T_ε, digit/sign extraction, convergents p_n/q_n and the
//! approximation coefficients θ_n = q_n·|x − p_n/q_n|.
//!
//! For rational generators the whole trace is carried in exact rational
//! arithmetic (any f64 input is a dyadic rational), so θ via the defining
//! subtraction stays meaningful arbitrarily deep — in plain f64 the
//! convergents agree with x to the last bit after a few dozen steps and the
//! subtraction would be pure noise.

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat_from_f64, rat_to_f64};
use crate::partition::Partition;
use crate::signs::SignSpec;

/// Index of the partition interval visited at a step; `Infinite` marks the
/// absorbing endpoint 0 (its sign is fixed to 0 and t_∞ := 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Digit {
    Finite(u64),
    Infinite,
}

impl Digit {
    pub fn finite(&self) -> Option<u64> {
        match self {
            Digit::Finite(d) => Some(*d),
            Digit::Infinite => None,
        }
    }
}

/// One step of an expansion: digit, sign, orbit point T_ε^n(x), the scale
/// q_n, the convergent p_n/q_n and θ_n.
#[derive(Clone, Debug)]
pub struct Step {
    pub n: u32,
    pub digit: Digit,
    pub sign: bool,
    pub orbit: f64,
    pub q: f64,
    pub approx: f64,
    pub theta: f64,
}

#[derive(Clone, Debug)]
pub struct ExpansionTrace {
    pub x0: f64,
    pub steps: Vec<Step>,
    /// Whether the orbit reached 0 (the expansion is finite and exact).
    pub terminated: bool,
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0,1], got {x}")));
    }
    Ok(())
}

/// One application of T_ε: returns (T_ε(x), digit, sign). The digit is the
/// unique n with x ∈ (t_{n+1}, t_n] (infinite iff x = 0) and the sign is ε
/// at that index. Membership uses exact comparisons for rational generators.
pub fn apply_map(p: &Partition, eps: &SignSpec, x: f64) -> Result<(f64, Digit, bool)> {
    check_unit(x)?;
    if x == 0.0 {
        return Ok((0.0, Digit::Infinite, false));
    }
    if p.is_exact() {
        let xr = rat_from_f64(x).expect("finite x");
        let d = p.digit_of_exact(&xr).expect("nonzero x");
        let s = eps.bit(d);
        let t_hi = p.t_exact(d).expect("rational generator");
        let t_lo = p.t_exact(d + 1).expect("rational generator");
        let a = &t_hi - &t_lo;
        let y = if s { (t_hi - xr) / a } else { (xr - t_lo) / a };
        return Ok((rat_to_f64(&y), Digit::Finite(d), s));
    }
    let d = p.digit_of(x).expect("nonzero x");
    let s = eps.bit(d);
    let (t_hi, t_lo) = (p.t(d), p.t(d + 1));
    let a = p.a(d);
    let y = if s { (t_hi - x) / a } else { (x - t_lo) / a };
    Ok((y.clamp(0.0, 1.0), Digit::Finite(d), s))
}

/// Full expansion trace of x under T_ε for `n_steps` steps. After the orbit
/// hits 0 every later digit is infinite, the convergent freezes and θ = 0.
pub fn expand(p: &Partition, eps: &SignSpec, x: f64, n_steps: u32) -> Result<ExpansionTrace> {
    check_unit(x)?;
    if n_steps == 0 {
        return Err(Error::Domain("n_steps must be at least 1".into()));
    }
    if p.is_exact() {
        expand_exact(p, eps, x, n_steps)
    } else {
        expand_f64(p, eps, x, n_steps)
    }
}

fn expand_exact(p: &Partition, eps: &SignSpec, x: f64, n_steps: u32) -> Result<ExpansionTrace> {
    let x0 = rat_from_f64(x).expect("finite x");
    let mut y = x0.clone();
    let mut prod_a = BigRational::one(); // Π_{i<n} a_{d_i}
    let mut series = BigRational::zero(); // p_n/q_n as a value
    let mut parity = false; // Σ_{i<n} s_i mod 2
    let mut steps = Vec::with_capacity(n_steps as usize);
    let mut terminated = false;

    for n in 1..=n_steps {
        if terminated || y.is_zero() {
            terminated = true;
            steps.push(Step {
                n,
                digit: Digit::Infinite,
                sign: false,
                orbit: 0.0,
                q: f64::INFINITY,
                approx: rat_to_f64(&series),
                theta: 0.0,
            });
            continue;
        }
        let d = p.digit_of_exact(&y).expect("nonzero orbit point");
        let s = eps.bit(d);
        let t_hi = p.t_exact(d).expect("rational generator");
        let t_lo = p.t_exact(d + 1).expect("rational generator");
        let a = &t_hi - &t_lo;
        let t_ref = if s { t_hi.clone() } else { t_lo.clone() };

        let scale = &t_ref * &prod_a; // 1/q_n
        let term = if parity { -scale.clone() } else { scale.clone() };
        series += term;
        let theta = (x0.clone() - &series).abs() / &scale;
        y = if s { (t_hi - y) / &a } else { (y - t_lo) / &a };

        steps.push(Step {
            n,
            digit: Digit::Finite(d),
            sign: s,
            orbit: rat_to_f64(&y),
            q: rat_to_f64(&scale.recip()),
            approx: rat_to_f64(&series),
            theta: rat_to_f64(&theta),
        });

        prod_a *= a;
        parity ^= s;
    }
    Ok(ExpansionTrace { x0: x, steps, terminated })
}

fn expand_f64(p: &Partition, eps: &SignSpec, x: f64, n_steps: u32) -> Result<ExpansionTrace> {
    let mut y = x;
    let mut prod_a = 1.0f64;
    let mut series = 0.0f64;
    let mut parity = false;
    let mut steps = Vec::with_capacity(n_steps as usize);
    let mut terminated = false;

    for n in 1..=n_steps {
        if terminated || y == 0.0 {
            terminated = true;
            steps.push(Step {
                n,
                digit: Digit::Infinite,
                sign: false,
                orbit: 0.0,
                q: f64::INFINITY,
                approx: series,
                theta: 0.0,
            });
            continue;
        }
        let d = p.digit_of(y).expect("nonzero orbit point");
        let s = eps.bit(d);
        let (t_hi, t_lo) = (p.t(d), p.t(d + 1));
        let a = p.a(d);
        let t_ref = if s { t_hi } else { t_lo };

        let scale = t_ref * prod_a;
        series += if parity { -scale } else { scale };
        y = if s { (t_hi - y) / a } else { (y - t_lo) / a };
        y = y.clamp(0.0, 1.0);
        let q = 1.0 / scale;
        // the defining subtraction carries an absolute error of ~2^-53/scale;
        // below scale 1e-6 switch to the orbit form of θ to stay near 1e-10
        let theta = if scale >= 1e-6 { q * (x - series).abs() } else { a / t_ref * y };

        steps.push(Step {
            n,
            digit: Digit::Finite(d),
            sign: s,
            orbit: y,
            q,
            approx: series,
            theta,
        });

        prod_a *= a;
        parity ^= s;
    }
    Ok(ExpansionTrace { x0: x, steps, terminated })
}

/// Max over n of |θ_n − (a_{d_n}/t_{d_n+1−s_n})·T_ε^n(x)|: the stored θ comes
/// from the convergent route q_n·|x − p_n/q_n|, the right-hand side from the
/// orbit route, so agreement cross-validates the two accumulations.
/// Terminated steps contribute zero by convention.
pub fn theta_identity_check(trace: &ExpansionTrace, p: &Partition) -> f64 {
    let mut worst = 0.0f64;
    for step in &trace.steps {
        let Some(d) = step.digit.finite() else { continue };
        let t_ref = if step.sign { p.t(d) } else { p.t(d + 1) };
        let rhs = p.a(d) / t_ref * step.orbit;
        let residual = (step.theta - rhs).abs();
        if residual > worst {
            worst = residual;
        }
    }
    worst
}
