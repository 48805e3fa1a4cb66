//! Totally ramified quadratic towers over Q₂, truncated.
//!
//! An element of level `k` is a coefficient vector of length `2^k` over
//! `Z/2^M` in the power basis `∏ π_j^{ε_j}`. Index `r` carries `π_j` in bit
//! `j−1`, so the basis vector `b_r` has valuation `rev_k(r)` (bit reversal)
//! and `v(Σ c_r b_r) = min_r (2^k·v₂(c_r) + rev_k(r))` without cancellation.
//! Reduction modulo `π^N` therefore acts coefficientwise.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Elem = Vec<u64>;

#[derive(Clone, Debug)]
pub struct Step {
    /// `x² + βx + γ`, coefficients at the previous level
    pub beta: Elem,
    pub gamma: Elem,
}

#[derive(Clone, Debug)]
pub struct DyadicTower {
    pub name: String,
    pub steps: Vec<Step>,
    /// coefficients live modulo `2^precision`
    pub precision: u32,
    /// working level `N`
    pub level: u32,
    mask: u64,
}

/// Tower file: `{"steps": [[c0, c1], ...], "precision": M, "level": N}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub steps: Vec<(Value, Value)>,
    pub precision: Option<u32>,
    pub level: Option<u32>,
}

fn rev(r: usize, k: usize) -> u32 {
    let mut out = 0;
    for j in 0..k {
        if r >> j & 1 == 1 {
            out |= 1 << (k - 1 - j);
        }
    }
    out
}

fn v2(x: u64, m: u32) -> u32 {
    if x == 0 {
        m
    } else {
        x.trailing_zeros().min(m)
    }
}

impl DyadicTower {
    /// Validate Eisenstein conditions and precision headroom.
    pub fn new(name: &str, steps: Vec<Step>, precision: u32, level: u32) -> Result<DyadicTower> {
        if precision == 0 || precision > 60 {
            return Err(Error::Config(format!("precision {precision} outside 1..=60")));
        }
        let mask = if precision == 64 { u64::MAX } else { (1u64 << precision) - 1 };
        let mut t = DyadicTower { name: name.to_string(), steps: Vec::new(), precision, level, mask };
        for (k, s) in steps.into_iter().enumerate() {
            let len = 1usize << k;
            if s.beta.len() != len || s.gamma.len() != len {
                return Err(Error::input(format!("step {} coefficients must have length {len}", k + 1)));
            }
            let beta: Elem = s.beta.iter().map(|&c| c & mask).collect();
            let gamma: Elem = s.gamma.iter().map(|&c| c & mask).collect();
            if t.val(k, &gamma) != 1 {
                return Err(Error::input(format!("step {} is not Eisenstein: v(γ) ≠ 1", k + 1)));
            }
            if t.val(k, &beta) < 1 {
                return Err(Error::input(format!("step {} is not Eisenstein: v(β) = 0", k + 1)));
            }
            t.steps.push(Step { beta, gamma });
        }
        if t.steps.is_empty() {
            return Err(Error::input("a tower needs at least one step"));
        }
        let e = t.e_abs();
        let need = level.div_ceil(e) + 4;
        if precision < need {
            return Err(Error::Config(format!("precision {precision} too small for level {level} (need ≥ {need})")));
        }
        Ok(t)
    }

    /// Defaults: `N = max_a + 2·v_K(2) + 2`, `M = ⌈N/e⌉ + 4`.
    pub fn with_defaults(name: &str, steps: Vec<Step>, max_a: u32) -> Result<DyadicTower> {
        let e = 1u32 << steps.len();
        let level = max_a + 2 * e + 2;
        DyadicTower::new(name, steps, level.div_ceil(e) + 4, level)
    }

    pub fn height(&self) -> usize {
        self.steps.len()
    }

    /// `v_K(2)` at the top.
    pub fn e_abs(&self) -> u32 {
        1 << self.steps.len()
    }

    fn m(&self) -> u32 {
        self.precision
    }

    pub fn zero(&self, k: usize) -> Elem {
        vec![0; 1 << k]
    }

    pub fn from_int(&self, k: usize, n: i64) -> Elem {
        let mut v = self.zero(k);
        v[0] = (n as u64) & self.mask;
        v
    }

    /// The uniformiser `π_k` of level `k ≥ 1`.
    pub fn pi(&self, k: usize) -> Elem {
        let mut v = self.zero(k);
        if k == 0 {
            v[0] = 2;
        } else {
            v[1 << (k - 1)] = 1;
        }
        v
    }

    /// Embed level `k` into level `k+1`.
    pub fn embed(&self, x: &Elem) -> Elem {
        let mut v = x.clone();
        v.extend(std::iter::repeat(0).take(x.len()));
        v
    }

    pub fn val(&self, k: usize, x: &Elem) -> u32 {
        let e = 1u32 << k;
        let cap = self.m() * e;
        x.iter().enumerate().map(|(r, &c)| if c == 0 { cap } else { e * v2(c, self.m()) + rev(r, k) }).min().unwrap_or(cap).min(cap)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.wrapping_add(*y) & self.mask).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.wrapping_sub(*y) & self.mask).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().map(|x| x.wrapping_neg() & self.mask).collect()
    }

    pub fn mul(&self, k: usize, a: &Elem, b: &Elem) -> Elem {
        if k == 0 {
            return vec![a[0].wrapping_mul(b[0]) & self.mask];
        }
        let h = 1 << (k - 1);
        let (a0, a1) = (a[..h].to_vec(), a[h..].to_vec());
        let (b0, b1) = (b[..h].to_vec(), b[h..].to_vec());
        let st = &self.steps[k - 1];
        let t = self.mul(k - 1, &a1, &b1);
        let r0 = self.sub(&self.mul(k - 1, &a0, &b0), &self.mul(k - 1, &st.gamma, &t));
        let cross = self.add(&self.mul(k - 1, &a0, &b1), &self.mul(k - 1, &a1, &b0));
        let r1 = self.sub(&cross, &self.mul(k - 1, &st.beta, &t));
        let mut out = r0;
        out.extend(r1);
        out
    }

    pub fn pow(&self, k: usize, x: &Elem, mut n: u64) -> Elem {
        let mut base = x.clone();
        let mut acc = self.from_int(k, 1);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(k, &acc, &base);
            }
            base = self.mul(k, &base, &base);
            n >>= 1;
        }
        acc
    }

    /// Conjugation of the top step of level `k`: `σ(x₀ + x₁π) = (x₀ − βx₁) − x₁π`.
    pub fn sigma(&self, k: usize, x: &Elem) -> Elem {
        let h = 1 << (k - 1);
        let (x0, x1) = (x[..h].to_vec(), x[h..].to_vec());
        let st = &self.steps[k - 1];
        let mut out = self.sub(&x0, &self.mul(k - 1, &st.beta, &x1));
        out.extend(self.neg(&x1));
        out
    }

    /// `N_{K_k/K_{k−1}}(x) = x·σ(x)`.
    pub fn norm(&self, k: usize, x: &Elem) -> Result<Elem> {
        let p = self.mul(k, x, &self.sigma(k, x));
        let h = 1 << (k - 1);
        if p[h..].iter().any(|&c| c != 0) {
            return Err(Error::Precision("norm left the base field".into()));
        }
        Ok(p[..h].to_vec())
    }

    pub fn inv(&self, k: usize, x: &Elem) -> Result<Elem> {
        if self.val(k, x) != 0 {
            return Err(Error::input("only units are inverted"));
        }
        if k == 0 {
            // Newton iteration for odd inverses modulo 2^M
            let a = x[0];
            let mut y: u64 = 1;
            for _ in 0..6 {
                y = y.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(y)));
            }
            return Ok(vec![y & self.mask]);
        }
        let n = self.norm(k, x)?;
        let ni = self.inv(k - 1, &n)?;
        Ok(self.mul(k, &self.sigma(k, x), &self.embed(&ni)))
    }

    /// `x / π_k` for `v(x) ≥ 1` (loses at most one bit per level of precision).
    pub fn div_pi(&self, k: usize, x: &Elem) -> Result<Elem> {
        if self.val(k, x) < 1 {
            return Err(Error::input("division by the uniformiser needs v(x) ≥ 1"));
        }
        if k == 0 {
            return Ok(vec![(x[0] >> 1) & self.mask]);
        }
        let h = 1 << (k - 1);
        let (x0, x1) = (x[..h].to_vec(), x[h..].to_vec());
        let st = &self.steps[k - 1];
        // x₀/π = −(x₀/γ)(π + β)
        let ug = self.div_pi(k - 1, &st.gamma)?;
        let y = self.mul(k - 1, &self.div_pi(k - 1, &x0)?, &self.inv(k - 1, &ug)?);
        let mut out = self.sub(&x1, &self.mul(k - 1, &y, &st.beta));
        out.extend(self.neg(&y));
        Ok(out)
    }

    /// Canonical representative modulo `π^n` at level `k`.
    pub fn reduce(&self, k: usize, x: &Elem, n: u32) -> Elem {
        let e = 1u32 << k;
        x.iter()
            .enumerate()
            .map(|(r, &c)| {
                let rv = rev(r, k);
                if rv >= n {
                    0
                } else {
                    let bits = (n - rv).div_ceil(e).min(self.m());
                    c & ((1u64 << bits) - 1)
                }
            })
            .collect()
    }

    /// `1 + π^j` at level `k`.
    pub fn one_plus_pi_pow(&self, k: usize, j: u32) -> Elem {
        let p = self.pow(k, &self.pi(k), j as u64);
        self.add(&self.from_int(k, 1), &p)
    }
}

fn coeff(v: &Value, len: usize) -> Result<Elem> {
    let parse1 = |x: &Value| x.as_i64().map(|n| n as u64).ok_or_else(|| Error::input("tower coefficients must be integers"));
    match v {
        Value::Array(a) => {
            if a.len() != len {
                return Err(Error::input(format!("coefficient array must have length {len}")));
            }
            a.iter().map(parse1).collect()
        }
        other => {
            let mut out = vec![0u64; len];
            out[0] = parse1(other)?;
            Ok(out)
        }
    }
}

pub fn tower_make(spec: &TowerSpec, max_a: u32) -> Result<DyadicTower> {
    let steps = spec
        .steps
        .iter()
        .enumerate()
        .map(|(k, (c0, c1))| Ok(Step { gamma: coeff(c0, 1 << k)?, beta: coeff(c1, 1 << k)? }))
        .collect::<Result<Vec<_>>>()?;
    let name = spec.name.clone().unwrap_or_else(|| "tower".into());
    let e = 1u32 << steps.len();
    let level = spec.level.unwrap_or(max_a + 2 * e + 2);
    let precision = spec.precision.unwrap_or(level.div_ceil(e) + 4);
    DyadicTower::new(&name, steps, precision, level)
}

/// Builtin towers by name (coefficients as `x² + c1·x + c0`).
pub fn builtin_tower_spec(name: &str) -> Option<TowerSpec> {
    let steps: Vec<(Value, Value)> = match name {
        "Q2(i)" => vec![(json!(2), json!(2))],
        "Q2(sqrt2)" => vec![(json!(-2), json!(0))],
        "Q2(sqrt-2)" => vec![(json!(2), json!(0))],
        "Q2(sqrt2,sqrt(pi))" => vec![(json!(-2), json!(0)), (json!([0, -1]), json!([0, 0]))],
        "Q2(i,sqrt(pi))" => vec![(json!(2), json!(2)), (json!([0, -1]), json!([0, 0]))],
        _ => return None,
    };
    Some(TowerSpec { name: Some(name.to_string()), steps, precision: None, level: None })
}

pub const BUILTIN_TOWERS: [&str; 5] = ["Q2(i)", "Q2(sqrt2)", "Q2(sqrt-2)", "Q2(sqrt2,sqrt(pi))", "Q2(i,sqrt(pi))"];

/// Parsed tower file or builtin name, kept as a spec so the level can follow `max_a`.
pub fn load_tower(spec: &str) -> Result<TowerSpec> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_tower_spec(name).ok_or_else(|| Error::input(format!("no builtin tower named {name:?}")));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::input(format!("{spec}: {e}")))?;
    let mut t: TowerSpec = serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("{spec}: line {} column {}: {e}", e.line(), e.column())))?;
    if t.name.is_none() {
        t.name = Some(spec.to_string());
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Unit groups

/// `U¹/U^n` at level `k` as a finite abelian 2-group with a basis.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub level: usize,
    pub n: u32,
    pub basis: Vec<Elem>,
    /// `basis[i]` has order `2^exps[i]`
    pub exps: Vec<u32>,
    log: HashMap<Elem, Vec<u64>>,
}

impl UnitGroup {
    pub fn order(&self) -> usize {
        self.log.len()
    }

    /// Cyclic factor orders, largest first.
    pub fn invariants(&self) -> Vec<u64> {
        self.exps.iter().map(|&k| 1u64 << k).collect()
    }

    pub fn log(&self, t: &DyadicTower, x: &Elem) -> Result<&[u64]> {
        let key = t.reduce(self.level, x, self.n);
        self.log.get(&key).map(Vec::as_slice).ok_or_else(|| Error::input("not a principal unit"))
    }
}

/// Structure of `U¹/U^n` at level `k` by iterated extraction of maximal-order elements.
pub fn truncated_units(t: &DyadicTower, k: usize, n: u32) -> Result<UnitGroup> {
    if n < 1 {
        return Err(Error::input("n must be at least 1"));
    }
    if n > t.precision * (1 << k) - 4 {
        return Err(Error::Config(format!("level {n} exceeds the precision of the tower")));
    }
    let red = |x: &Elem| t.reduce(k, x, n);
    let mul = |a: &Elem, b: &Elem| red(&t.mul(k, a, b));
    let one = red(&t.from_int(k, 1));
    let gens: Vec<Elem> = (1..n).map(|j| red(&t.one_plus_pi_pow(k, j))).collect();
    // all elements, in breadth-first order from the generators
    let mut all = vec![one.clone()];
    let mut seen: HashMap<Elem, ()> = HashMap::from([(one.clone(), ())]);
    let mut i = 0;
    while i < all.len() {
        for g in &gens {
            let y = mul(&all[i], g);
            if seen.insert(y.clone(), ()).is_none() {
                all.push(y);
            }
        }
        i += 1;
    }
    if all.len() != 1usize << (n - 1) {
        return Err(Error::Theorem(format!("|U¹/U^{n}| = {} instead of 2^{}", all.len(), n - 1)));
    }
    let order2 = |x: &Elem, inside: &HashMap<Elem, Vec<u64>>| -> u32 {
        let mut y = x.clone();
        let mut k = 0;
        while !inside.contains_key(&y) {
            y = mul(&y, &y);
            k += 1;
        }
        k
    };
    let mut s: HashMap<Elem, Vec<u64>> = HashMap::from([(one.clone(), vec![])]);
    let mut s_list = vec![one.clone()];
    let mut basis: Vec<Elem> = Vec::new();
    let mut exps: Vec<u32> = Vec::new();
    while s.len() < all.len() {
        let (best, kk) = all
            .iter()
            .map(|x| (x, order2(x, &s)))
            .fold((None, 0), |acc, (x, k)| if k > acc.1 { (Some(x), k) } else { acc });
        let y = best.expect("S is proper").clone();
        // y^{2^k} = ∏ x_i^{a_i}; divide the exponents by 2^k
        let mut p = y.clone();
        for _ in 0..kk {
            p = mul(&p, &p);
        }
        let a = s[&p].clone();
        let mut yc = y.clone();
        let mut ok = a.iter().all(|&ai| ai % (1 << kk) == 0);
        if ok {
            for (bi, (&ai, &ei)) in basis.iter().zip(a.iter().zip(&exps)) {
                let c = ((1u64 << ei) - (ai >> kk) % (1 << ei)) % (1 << ei);
                yc = mul(&yc, &red(&t.pow(k, bi, c)));
            }
            let mut q = yc.clone();
            for _ in 0..kk {
                q = mul(&q, &q);
            }
            ok = q == one;
        }
        if !ok {
            // fall back to a search through the coset yS
            yc = s_list
                .iter()
                .map(|x| mul(&y, x))
                .find(|z| {
                    let mut q = z.clone();
                    for _ in 0..kk {
                        q = mul(&q, &q);
                    }
                    q == one
                })
                .ok_or_else(|| Error::Theorem("no complement found in unit group".into()))?;
        }
        let mut new_s = HashMap::with_capacity(s.len() << kk);
        let mut new_list = Vec::with_capacity(s.len() << kk);
        let mut pw = one.clone();
        for j in 0..(1u64 << kk) {
            for x in &s_list {
                let z = mul(x, &pw);
                let mut l = s[x].clone();
                l.push(j);
                new_s.insert(z.clone(), l);
                new_list.push(z);
            }
            pw = mul(&pw, &yc);
        }
        s = new_s;
        s_list = new_list;
        basis.push(yc);
        exps.push(kk);
    }
    Ok(UnitGroup { level: k, n, basis, exps, log: s })
}

// ---------------------------------------------------------------------------
// Characters

/// A character of `K^×/U^{a+1}` with values in `μ_{2^K}`, stored additively:
/// the value on `basis[i]` is `ζ^{t_i·2^{K−k_i}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelChar {
    pub index: usize,
    /// value on the uniformiser, ±1
    pub pi_sign: i8,
    pub coords: Vec<u64>,
    pub swan: u32,
}

/// Value of a character on a unit, as an exponent of `ζ_{2^K}`, `K = max exps`.
fn char_value(u: &UnitGroup, coords: &[u64], log: &[u64]) -> u64 {
    let big = u.exps.iter().copied().max().unwrap_or(0);
    let modulus = 1u64 << big;
    log.iter().zip(coords).zip(&u.exps).fold(0, |acc, ((&l, &c), &e)| (acc + l * c % modulus * (1 << (big - e))) % modulus)
}

fn unit_order_exp(u: &UnitGroup) -> u32 {
    u.exps.iter().copied().max().unwrap_or(0)
}

/// Context for characters of the top level `K` over `F` (one step below).
#[derive(Clone, Debug)]
pub struct StepContext {
    pub tower: DyadicTower,
    pub max_a: u32,
    pub units_k: UnitGroup,
    pub units_f: UnitGroup,
    /// `ω` on `U_F¹/U_F^{cut}`: value 0 or 1 (in `Z/2`)
    omega_units: UnitGroup,
    omega_kernel: HashMap<Elem, ()>,
    pub s: u32,
    /// `e = v_F(2)`
    pub e: u32,
    /// `σ(π)/π`
    u_sigma: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwanTarget {
    Itself,
    Square,
    RestrictBase,
    TwistByOmega,
}

/// Norm image in `U_F¹/U_F^{cut}`, `ω` and `s = Sw(ω)` for the top step.
pub fn norm_subgroup(t: &DyadicTower) -> Result<(UnitGroup, HashMap<Elem, ()>, u32)> {
    let k = t.height();
    let f = k - 1;
    let e_f = 1u32 << f;
    let cut = 2 * e_f + 2;
    let uf = truncated_units(t, f, cut)?;
    let red = |x: &Elem| t.reduce(f, x, cut);
    let one = red(&t.from_int(f, 1));
    let gens: Vec<Elem> =
        (1..2 * cut).map(|j| t.norm(k, &t.one_plus_pi_pow(k, j)).map(|n| red(&n))).collect::<Result<_>>()?;
    let mut img = vec![one.clone()];
    let mut seen: HashMap<Elem, ()> = HashMap::from([(one, ())]);
    let mut i = 0;
    while i < img.len() {
        for g in &gens {
            let y = red(&t.mul(f, &img[i], g));
            if seen.insert(y.clone(), ()).is_none() {
                img.push(y);
            }
        }
        i += 1;
    }
    if img.len() * 2 != uf.order() {
        return Err(Error::Precision(format!("norm index {} ≠ 2 at cut {cut}", uf.order() / img.len().max(1))));
    }
    let omega_nontrivial = |j: u32| !seen.contains_key(&red(&t.one_plus_pi_pow(f, j)));
    let s = (1..cut).filter(|&j| omega_nontrivial(j)).max().unwrap_or(0);
    if s == 0 || s > 2 * e_f {
        return Err(Error::Theorem(format!("s = {s} violates 0 < s ≤ 2e = {}", 2 * e_f)));
    }
    Ok((uf, seen, s))
}

impl StepContext {
    pub fn new(tower: &DyadicTower, max_a: u32) -> Result<StepContext> {
        let e_abs = tower.e_abs();
        if max_a + 2 * e_abs + 2 > tower.level {
            return Err(Error::Config(format!(
                "max_a = {max_a} needs working level ≥ {} (tower has {})",
                max_a + 2 * e_abs + 2,
                tower.level
            )));
        }
        let k = tower.height();
        let units_k = truncated_units(tower, k, max_a + 1)?;
        let units_f = truncated_units(tower, k - 1, (max_a + 1).div_ceil(2).max(1))?;
        let (omega_units, omega_kernel, s) = norm_subgroup(tower)?;
        let pi = tower.pi(k);
        let u_sigma = tower.div_pi(k, &tower.sigma(k, &pi))?;
        Ok(StepContext {
            tower: tower.clone(),
            max_a,
            units_k,
            units_f,
            omega_units,
            omega_kernel,
            s,
            e: e_abs / 2,
            u_sigma,
        })
    }

    fn chi_at(&self, chi: &LevelChar, x: &Elem) -> Result<u64> {
        let l = self.units_k.log(&self.tower, x)?;
        Ok(char_value(&self.units_k, &chi.coords, l))
    }

    fn modulus(&self) -> u64 {
        1 << unit_order_exp(&self.units_k)
    }

    /// `ω(u)` for a principal unit of `F`, as 0 or half the modulus.
    fn omega_at(&self, u: &Elem) -> u64 {
        let f = self.tower.height() - 1;
        let key = self.tower.reduce(f, u, self.omega_units.n);
        if self.omega_kernel.contains_key(&key) {
            0
        } else {
            self.modulus() / 2
        }
    }

    /// Enumerate characters of `K^×/U^{max_a+1}` with `χ(π) = ±1`, sorted by
    /// (swan level, coordinates, sign).
    pub fn char_enumerate(&self) -> Vec<LevelChar> {
        let u = &self.units_k;
        let mut out = Vec::new();
        let total: u64 = u.exps.iter().map(|&e| 1u64 << e).product();
        for code in 0..total {
            let mut c = code;
            let coords: Vec<u64> = u
                .exps
                .iter()
                .map(|&e| {
                    let v = c % (1 << e);
                    c >>= e;
                    v
                })
                .collect();
            let probe = LevelChar { index: 0, pi_sign: 1, coords: coords.clone(), swan: 0 };
            let a = self.level_of(|j| self.chi_at(&probe, &self.tower.one_plus_pi_pow(self.tower.height(), j)).unwrap_or(0), self.max_a);
            for sign in [1i8, -1] {
                out.push(LevelChar { index: 0, pi_sign: sign, coords: coords.clone(), swan: a });
            }
        }
        out.sort_by(|x, y| (x.swan, &x.coords, -x.pi_sign).cmp(&(y.swan, &y.coords, -y.pi_sign)));
        for (i, c) in out.iter_mut().enumerate() {
            c.index = i;
        }
        out
    }

    /// Largest `j ≤ top` with `value(1 + π^j) ≠ 0`.
    fn level_of(&self, value: impl Fn(u32) -> u64, top: u32) -> u32 {
        (1..=top).filter(|&j| value(j) % self.modulus() != 0).max().unwrap_or(0)
    }

    pub fn char_swan(&self, chi: &LevelChar, target: SwanTarget) -> Result<u32> {
        let t = &self.tower;
        let k = t.height();
        let f = k - 1;
        let m = self.modulus();
        Ok(match target {
            SwanTarget::Itself => self.level_of(|j| self.chi_at(chi, &t.one_plus_pi_pow(k, j)).unwrap_or(0), self.max_a),
            SwanTarget::Square => {
                self.level_of(|j| 2 * self.chi_at(chi, &t.one_plus_pi_pow(k, j)).unwrap_or(0) % m, self.max_a)
            }
            SwanTarget::RestrictBase => {
                let top = self.max_a / 2;
                self.level_of(|j| self.chi_at(chi, &t.embed(&t.one_plus_pi_pow(f, j))).unwrap_or(0), top)
            }
            SwanTarget::TwistByOmega => {
                let top = (self.max_a / 2).max(self.omega_units.n - 1);
                self.level_of(
                    |j| {
                        let u = t.one_plus_pi_pow(f, j);
                        let c = if 2 * j <= self.max_a { self.chi_at(chi, &t.embed(&u)).unwrap_or(0) } else { 0 };
                        (c + self.omega_at(&u)) % m
                    },
                    top,
                )
            }
        })
    }

    /// `χ∘σ = χ` (then `Ind χ` is reducible).
    pub fn is_sigma_fixed(&self, chi: &LevelChar) -> Result<bool> {
        let t = &self.tower;
        let k = t.height();
        for j in 1..=self.max_a {
            let u = t.one_plus_pi_pow(k, j);
            if self.chi_at(chi, &t.sigma(k, &u))? != self.chi_at(chi, &u)? {
                return Ok(false);
            }
        }
        Ok(self.chi_at(chi, &self.u_sigma)? == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoDimRecord {
    pub character: usize,
    pub pi_sign: i8,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub s: u32,
    pub e: u32,
    pub swan_rho: u32,
    pub delta: u32,
    pub conjecture_ok: bool,
    pub equality: bool,
    pub symplectic: bool,
    /// squaring trichotomy branch: "a>4e", "a<4e_even", "other"
    pub squaring_branch: &'static str,
    /// case analysis: "c>s", "c<s", "c=s,d=s", "c=s,d<s"
    pub case: &'static str,
    pub checks: BTreeMap<&'static str, bool>,
}

impl TwoDimRecord {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|&v| v)
    }
}

/// Invariants `(a, b, c, d, s, e)` and checks for one character.
pub fn two_dim_record(ctx: &StepContext, chi: &LevelChar) -> Result<TwoDimRecord> {
    if ctx.is_sigma_fixed(chi)? {
        return Err(Error::input("χ∘σ = χ: the induced representation is reducible"));
    }
    let a = ctx.char_swan(chi, SwanTarget::Itself)?;
    let b = ctx.char_swan(chi, SwanTarget::Square)?;
    let c = ctx.char_swan(chi, SwanTarget::RestrictBase)?;
    let d = ctx.char_swan(chi, SwanTarget::TwistByOmega)?;
    let s = ctx.s;
    let e = ctx.e;
    let swan_rho = a + s;
    let delta = b + s + c - d;
    let mut checks = BTreeMap::new();
    checks.insert("rel1_d_le_max_c_s", d <= c.max(s) && (c == s || d == c.max(s)));
    checks.insert("rel2_a_ge_2c", a >= 2 * c);
    checks.insert("rel3_s_bounds", s > 0 && s <= 2 * e);
    checks.insert("rel4_a_ge_s", a >= s);
    let branch = if a > 4 * e {
        checks.insert("squaring", b == a - 2 * e);
        "a>4e"
    } else if a % 2 == 0 {
        checks.insert("squaring", b == a / 2);
        "a<4e_even"
    } else {
        checks.insert("squaring", 2 * b <= a);
        "other"
    };
    let branch = if a == 4 * e { "other" } else { branch };
    if a == 4 * e {
        checks.insert("squaring", 2 * b <= a);
    }
    let case = if c > s {
        checks.insert("case_strict", delta == b + s && delta < swan_rho);
        "c>s"
    } else if c < s {
        checks.insert("case_strict", delta == b + c && delta <= swan_rho);
        "c<s"
    } else if d == s {
        "c=s,d=s"
    } else {
        "c=s,d<s"
    };
    let conjecture_ok = delta <= swan_rho;
    let equality = delta == swan_rho;
    checks.insert("theorem_bound", conjecture_ok);
    checks.insert("equality_implies_d0", !equality || d == 0);
    Ok(TwoDimRecord {
        character: chi.index,
        pi_sign: chi.pi_sign,
        a,
        b,
        c,
        d,
        s,
        e,
        swan_rho,
        delta,
        conjecture_ok,
        equality,
        symplectic: d == 0,
        squaring_branch: branch,
        case,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicSweep {
    pub tower: String,
    pub e_abs: u32,
    pub e: u32,
    pub s: u32,
    pub max_a: u32,
    pub level: u32,
    pub precision: u32,
    pub unit_invariants: Vec<u64>,
    pub characters: usize,
    pub sigma_fixed: usize,
    pub records: Vec<TwoDimRecord>,
    pub failures: usize,
    pub branch_counts: BTreeMap<String, usize>,
    /// `(a, b) → count` where the squaring lemma only bounds `b`
    pub unpredicted_b: BTreeMap<String, usize>,
    pub remark_witness: Option<usize>,
}

impl DyadicSweep {
    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 {
            2
        } else {
            0
        }
    }

    pub fn summary_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        if let Value::Object(m) = &mut v {
            m.remove("records");
        }
        v["type"] = json!("dyadic_summary");
        v
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mut v = serde_json::to_value(r).expect("serialisable");
            v["type"] = json!("two_dim");
            v["tower"] = json!(self.tower);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out.push_str(&self.summary_json().to_string());
        out.push('\n');
        out
    }
}

/// Sweep every wild, σ-moved character with `a ≤ max_a` on the top step of a tower.
pub fn two_dim_report(spec: &TowerSpec, max_a: u32) -> Result<DyadicSweep> {
    let tower = tower_make(spec, max_a)?;
    let ctx = StepContext::new(&tower, max_a)?;
    let chars = ctx.char_enumerate();
    let mut records = Vec::new();
    let mut sigma_fixed = 0;
    let mut branch_counts = BTreeMap::new();
    let mut unpredicted = BTreeMap::new();
    for chi in &chars {
        if chi.swan == 0 {
            continue;
        }
        if ctx.is_sigma_fixed(chi)? {
            sigma_fixed += 1;
            continue;
        }
        let r = two_dim_record(&ctx, chi)?;
        *branch_counts.entry(format!("{}|{}", r.squaring_branch, r.case)).or_insert(0) += 1;
        if r.squaring_branch == "other" {
            *unpredicted.entry(format!("a={},b={}", r.a, r.b)).or_insert(0) += 1;
        }
        records.push(r);
    }
    let failures = records.iter().filter(|r| !r.all_pass()).count();
    let remark_witness = records
        .iter()
        .find(|r| (r.a, r.b, r.c, r.d, r.s) == (2, 1, 1, 0, 1) && r.delta == r.swan_rho)
        .map(|r| r.character);
    Ok(DyadicSweep {
        tower: tower.name.clone(),
        e_abs: tower.e_abs(),
        e: ctx.e,
        s: ctx.s,
        max_a,
        level: tower.level,
        precision: tower.precision,
        unit_invariants: ctx.units_k.invariants(),
        characters: chars.len(),
        sigma_fixed,
        records,
        failures,
        branch_counts,
        unpredicted_b: unpredicted,
        remark_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(name: &str, max_a: u32) -> DyadicTower {
        tower_make(&builtin_tower_spec(name).unwrap(), max_a).unwrap()
    }

    #[test]
    fn q2_units() {
        let t = tower("Q2(i)", 4);
        let u = truncated_units(&t, 0, 3).unwrap();
        assert_eq!(u.order(), 4);
        assert_eq!(u.invariants(), vec![2, 2]);
        assert_eq!(truncated_units(&t, 1, 5).unwrap().order(), 16);
        assert_eq!(truncated_units(&t, 1, 2).unwrap().invariants(), vec![2]);
    }

    #[test]
    fn arithmetic_roundtrip() {
        let t = tower("Q2(i,sqrt(pi))", 4);
        let k = 2;
        let x = t.one_plus_pi_pow(k, 1);
        let y = t.inv(k, &x).unwrap();
        assert_eq!(t.reduce(k, &t.mul(k, &x, &y), 20), t.reduce(k, &t.from_int(k, 1), 20));
        let pi = t.pi(k);
        assert_eq!(t.val(k, &pi), 1);
        assert_eq!(t.val(k, &t.from_int(k, 2)), 4);
        let q = t.div_pi(k, &t.mul(k, &pi, &x)).unwrap();
        assert_eq!(t.reduce(k, &q, 16), t.reduce(k, &x, 16));
    }

    #[test]
    fn not_eisenstein() {
        let spec = TowerSpec { name: None, steps: vec![(json!(4), json!(0))], precision: None, level: None };
        assert!(matches!(tower_make(&spec, 2), Err(Error::Input(_))));
    }

    #[test]
    fn s_values() {
        for (name, s) in [("Q2(i)", 1), ("Q2(sqrt2)", 2), ("Q2(sqrt-2)", 2)] {
            let (_, _, got) = norm_subgroup(&tower(name, 2)).unwrap();
            assert_eq!(got, s, "{name}");
        }
    }
}
