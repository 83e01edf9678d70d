//! `H_*(MU; F_p)` and `H_*(MSU; F_p)` at odd primes as comodule algebras
//! over the dual Steenrod algebra, together with the splitting of
//! `H_*(MSU)` as `A' (x) PH`.
//!
//! Generators (all in even degree, so no signs anywhere in this module):
//!
//! * `H_*(MU) = F_p[z_1, z_2, ...]`, `|z_n| = 2n`;
//! * `H_*(MSU) = F_p[Y_2, Y_3, ...]`, `|Y_n| = 2n`;
//! * `PH = F_p[Y_n : n >= 2, n != p^t - 1]`, the polynomial algebra on the
//!   primitive generators;
//! * `A' (x) PH`, polynomial on the `xi_i` together with the PH generators.
//!
//! The coaction is multiplicative, primitive on `z_n` / `Y_n` for
//! `n != p^t - 1`, and on the exceptional generators (writing `xibar_s` for
//! `chi(xi_s)`):
//!
//! ```text
//! rho(Y_{p^t - 1}) = -xibar_t (x) 1 + sum_{s=0}^{t-1} xibar_s (x) Y_{p^{t-s}-1}^{p^s}
//! ```
//!
//! (same formula with `z` in `H_*(MU)`). The splitting `G` sends
//! `Y_{p^t - 1}` to `-xibar_t (x) 1` and every other generator to
//! `1 (x) Y_n`; [`verify_g_iso`] checks degreewise that `G` is an
//! isomorphism of comodule algebras.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::dual::{antipode, coproduct, Ambient, DualElement, MilnorMonomial};
use crate::fp::Prime;
use crate::{Error, Result};

/// Which comodule algebra a [`ComodulePoly`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ThomAlgebra {
    Mu,
    Msu,
    PhMsu,
    APrimeTensorPh,
}

impl ThomAlgebra {
    pub fn as_str(self) -> &'static str {
        match self {
            ThomAlgebra::Mu => "MU",
            ThomAlgebra::Msu => "MSU",
            ThomAlgebra::PhMsu => "PH_MSU",
            ThomAlgebra::APrimeTensorPh => "APrime_tensor_PH",
        }
    }

    pub fn parse(s: &str) -> Result<ThomAlgebra> {
        match s {
            "MU" | "mu" => Ok(ThomAlgebra::Mu),
            "MSU" | "msu" => Ok(ThomAlgebra::Msu),
            "PH_MSU" | "ph-msu" => Ok(ThomAlgebra::PhMsu),
            "APrime_tensor_PH" | "a-prime-tensor-ph" => Ok(ThomAlgebra::APrimeTensorPh),
            _ => Err(Error::Invalid(format!("unknown comodule algebra `{s}`"))),
        }
    }
}

impl std::fmt::Display for ThomAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A polynomial generator: `xi_i` (in the `A'` factor of `A' (x) PH`),
/// `z_n` (MU), or `Y_n` (MSU and its subalgebras).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoGen {
    Xi(u32),
    Z(u32),
    Y(u32),
}

impl CoGen {
    pub fn degree(self, p: Prime) -> u64 {
        match self {
            CoGen::Xi(i) => 2 * ((p.get() as u64).pow(i) - 1),
            CoGen::Z(n) | CoGen::Y(n) => 2 * n as u64,
        }
    }

    fn valid_for(self, p: Prime, algebra: ThomAlgebra) -> bool {
        match (algebra, self) {
            (ThomAlgebra::Mu, CoGen::Z(n)) => n >= 1,
            (ThomAlgebra::Msu, CoGen::Y(n)) => n >= 2,
            (ThomAlgebra::PhMsu, CoGen::Y(n)) => n >= 2 && !is_p_power_minus_1(p, n),
            (ThomAlgebra::APrimeTensorPh, CoGen::Xi(i)) => i >= 1,
            (ThomAlgebra::APrimeTensorPh, CoGen::Y(n)) => n >= 2 && !is_p_power_minus_1(p, n),
            _ => false,
        }
    }
}

/// Whether `n = p^t - 1` for some `t >= 1`.
pub fn is_p_power_minus_1(p: Prime, n: u32) -> bool {
    let mut pt = p.get() as u64;
    loop {
        match (pt - 1).cmp(&(n as u64)) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Less => pt *= p.get() as u64,
        }
    }
}

impl std::fmt::Display for CoGen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoGen::Xi(i) => write!(f, "xi{i}"),
            CoGen::Z(n) => write!(f, "z{n}"),
            CoGen::Y(n) => write!(f, "Y{n}"),
        }
    }
}

/// A monomial in the generators: sorted `(generator, exponent)` pairs with
/// positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ThomMonomial(Vec<(CoGen, u32)>);

impl ThomMonomial {
    pub fn unit() -> ThomMonomial {
        ThomMonomial::default()
    }

    pub fn gen(g: CoGen, e: u32) -> ThomMonomial {
        if e == 0 {
            ThomMonomial::unit()
        } else {
            ThomMonomial(vec![(g, e)])
        }
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(CoGen, u32)] {
        &self.0
    }

    pub fn degree(&self, p: Prime) -> u64 {
        self.0.iter().map(|&(g, e)| g.degree(p) * e as u64).sum()
    }

    pub fn valid_for(&self, p: Prime, algebra: ThomAlgebra) -> bool {
        self.0.iter().all(|&(g, _)| g.valid_for(p, algebra))
    }

    pub fn mul(&self, other: &ThomMonomial) -> ThomMonomial {
        let mut map: BTreeMap<CoGen, u32> = self.0.iter().copied().collect();
        for &(g, e) in &other.0 {
            *map.entry(g).or_insert(0) += e;
        }
        ThomMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    /// `[[n, e], ...]` with `n > 0` for `z_n`/`Y_n` and `n < 0` for `xi_{-n}`.
    pub fn to_json(&self) -> Value {
        let exps: Vec<Value> = self
            .0
            .iter()
            .map(|&(g, e)| {
                let n: i64 = match g {
                    CoGen::Xi(i) => -(i as i64),
                    CoGen::Z(n) | CoGen::Y(n) => n as i64,
                };
                json!([n, e])
            })
            .collect();
        json!(exps)
    }

    pub fn from_json(v: &Value, algebra: ThomAlgebra) -> Result<ThomMonomial> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid("`exps` must be an array of [n, e] pairs".into()))?;
        let mut map: BTreeMap<CoGen, u32> = BTreeMap::new();
        for pair in arr {
            let pair = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Invalid("each exps entry must be [n, e]".into()))?;
            let n = pair[0]
                .as_i64()
                .ok_or_else(|| Error::Invalid("bad generator index".into()))?;
            let e = pair[1]
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| Error::Invalid("bad exponent".into()))?;
            let g = if n < 0 {
                CoGen::Xi((-n) as u32)
            } else if algebra == ThomAlgebra::Mu {
                CoGen::Z(n as u32)
            } else {
                CoGen::Y(n as u32)
            };
            if e > 0 {
                *map.entry(g).or_insert(0) += e;
            }
        }
        Ok(ThomMonomial(map.into_iter().collect()))
    }
}

impl std::fmt::Display for ThomMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    g.to_string()
                } else {
                    format!("{g}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A polynomial in one of the comodule algebras, coefficients in F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComodulePoly {
    p: Prime,
    algebra: ThomAlgebra,
    terms: BTreeMap<ThomMonomial, u32>,
}

impl ComodulePoly {
    pub fn zero(p: Prime, algebra: ThomAlgebra) -> ComodulePoly {
        ComodulePoly {
            p,
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: Prime, algebra: ThomAlgebra) -> ComodulePoly {
        let mut e = ComodulePoly::zero(p, algebra);
        e.add_term(ThomMonomial::unit(), 1).unwrap();
        e
    }

    pub fn single(
        p: Prime,
        algebra: ThomAlgebra,
        m: ThomMonomial,
        coeff: i64,
    ) -> Result<ComodulePoly> {
        let mut e = ComodulePoly::zero(p, algebra);
        e.add_term(m, coeff)?;
        Ok(e)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn algebra(&self) -> ThomAlgebra {
        self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<ThomMonomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: ThomMonomial, coeff: i64) -> Result<()> {
        if !m.valid_for(self.p, self.algebra) {
            return Err(Error::Invalid(format!(
                "monomial `{m}` is not valid in {} at p = {}",
                self.algebra, self.p
            )));
        }
        let c = self.p.reduce(coeff);
        if c == 0 {
            return Ok(());
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = self.p.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    pub fn add(&mut self, other: &ComodulePoly) -> Result<()> {
        if (self.p, self.algebra) != (other.p, other.algebra) {
            return Err(Error::AmbientMismatch(
                self.algebra.to_string(),
                other.algebra.to_string(),
            ));
        }
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c as i64)?;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: i64) {
        let c = self.p.reduce(c);
        if c == 0 {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v = self.p.mul(*v, c);
        }
    }

    pub fn mul(&self, other: &ComodulePoly) -> Result<ComodulePoly> {
        if (self.p, self.algebra) != (other.p, other.algebra) {
            return Err(Error::AmbientMismatch(
                self.algebra.to_string(),
                other.algebra.to_string(),
            ));
        }
        let mut out = ComodulePoly::zero(self.p, self.algebra);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), self.p.mul(ca, cb) as i64)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<ComodulePoly> {
        let mut acc = ComodulePoly::unit(self.p, self.algebra);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&ThomMonomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.degree(self.p), (*m).clone()));
        let terms: Vec<Value> = keys
            .into_iter()
            .map(|m| json!({ "coeff": self.terms[m], "exps": m.to_json() }))
            .collect();
        json!({ "p": self.p.get(), "algebra": self.algebra.as_str(), "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<ComodulePoly> {
        let p = Prime::new(
            v.get("p")
                .and_then(Value::as_u64)
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Invalid("polynomial missing prime `p`".into()))?,
        )?;
        let algebra = ThomAlgebra::parse(
            v.get("algebra")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Invalid("polynomial missing `algebra`".into()))?,
        )?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("polynomial missing `terms` array".into()))?;
        let mut out = ComodulePoly::zero(p, algebra);
        for t in terms {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Invalid("term missing integer `coeff`".into()))?;
            let exps = t
                .get("exps")
                .ok_or_else(|| Error::Invalid("term missing `exps`".into()))?;
            out.add_term(ThomMonomial::from_json(exps, algebra)?, coeff)?;
        }
        Ok(out)
    }
}

/// An element of `A' (x) M` for a comodule algebra `M`: the shape of a
/// coaction value. Left factors are xi-only Milnor monomials; everything in
/// sight is even, so multiplication is sign-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoactionTensor {
    p: Prime,
    algebra: ThomAlgebra,
    terms: BTreeMap<(MilnorMonomial, ThomMonomial), u32>,
}

impl CoactionTensor {
    pub fn zero(p: Prime, algebra: ThomAlgebra) -> CoactionTensor {
        CoactionTensor {
            p,
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: Prime, algebra: ThomAlgebra) -> CoactionTensor {
        let mut t = CoactionTensor::zero(p, algebra);
        t.add_term(MilnorMonomial::unit(), ThomMonomial::unit(), 1);
        t
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn algebra(&self) -> ThomAlgebra {
        self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<(MilnorMonomial, ThomMonomial), u32> {
        &self.terms
    }

    pub fn add_term(&mut self, left: MilnorMonomial, right: ThomMonomial, coeff: i64) {
        debug_assert!(left.tau.is_empty(), "coaction left factors are xi-only");
        let c = self.p.reduce(coeff);
        if c == 0 {
            return;
        }
        let key = (left, right);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = self.p.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&mut self, other: &CoactionTensor) {
        assert_eq!((self.p, self.algebra), (other.p, other.algebra));
        for ((l, r), &c) in &other.terms {
            self.add_term(l.clone(), r.clone(), c as i64);
        }
    }

    pub fn mul(&self, other: &CoactionTensor) -> CoactionTensor {
        assert_eq!((self.p, self.algebra), (other.p, other.algebra));
        let mut out = CoactionTensor::zero(self.p, self.algebra);
        for ((la, ra), &ca) in &self.terms {
            for ((lb, rb), &cb) in &other.terms {
                // Left factors are even, so no Koszul sign; tau-free
                // monomial products never vanish.
                let (l, s) = la.mul(lb, self.p).expect("xi-only monomials");
                debug_assert_eq!(s, 1);
                out.add_term(l, ra.mul(rb), self.p.mul(ca, cb) as i64);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> CoactionTensor {
        let mut acc = CoactionTensor::unit(self.p, self.algebra);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&mut self, c: i64) {
        let c = self.p.reduce(c);
        if c == 0 {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v = self.p.mul(*v, c);
        }
    }

    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&(MilnorMonomial, ThomMonomial)> = self.terms.keys().collect();
        keys.sort_by_key(|(l, r)| (l.degree(self.p) + r.degree(self.p), l.clone(), r.clone()));
        let terms: Vec<Value> = keys
            .into_iter()
            .map(|k| {
                json!({
                    "coeff": self.terms[k],
                    "left": k.0.to_json(),
                    "right": k.1.to_json(),
                })
            })
            .collect();
        json!({ "p": self.p.get(), "algebra": self.algebra.as_str(), "terms": terms })
    }
}

/// `chi(xi_s)` as an `A'` element (`xibar_0 = 1`).
pub fn xibar(p: Prime, s: u32) -> DualElement {
    if s == 0 {
        return DualElement::unit(p, Ambient::APrime);
    }
    let gen =
        DualElement::single(p, Ambient::Full, MilnorMonomial::xi_gen(s as usize, 1), 1).unwrap();
    antipode(&gen).unwrap().project(Ambient::APrime)
}

/// Reinterprets an `A'` element as a polynomial in the `xi_i` inside one of
/// the algebras that contain them (`A' (x) PH`).
pub fn aprime_as_poly(x: &DualElement, algebra: ThomAlgebra) -> Result<ComodulePoly> {
    if x.ambient() != Ambient::APrime {
        return Err(Error::AmbientMismatch(
            x.ambient().to_string(),
            Ambient::APrime.to_string(),
        ));
    }
    let mut out = ComodulePoly::zero(x.p(), algebra);
    for (m, &c) in x.terms() {
        let mut mono = ThomMonomial::unit();
        for (i, r) in m.xi.iter() {
            mono = mono.mul(&ThomMonomial::gen(CoGen::Xi(i as u32), r));
        }
        out.add_term(mono, c as i64)?;
    }
    Ok(out)
}

/// Coaction on a single generator.
fn coaction_gen(p: Prime, algebra: ThomAlgebra, g: CoGen) -> CoactionTensor {
    let mut out = CoactionTensor::zero(p, algebra);
    let make = |n: u32| match algebra {
        ThomAlgebra::Mu => CoGen::Z(n),
        _ => CoGen::Y(n),
    };
    match (algebra, g) {
        (ThomAlgebra::Mu, CoGen::Z(n)) | (ThomAlgebra::Msu, CoGen::Y(n)) => {
            if let Some(t) = p_power_exponent(p, n) {
                // -xibar_t (x) 1 + sum_{s<t} xibar_s (x) gen_{p^{t-s}-1}^{p^s}.
                let mut lead = xibar(p, t);
                lead.scale(-1);
                for (m, &c) in lead.terms() {
                    out.add_term(m.clone(), ThomMonomial::unit(), c as i64);
                }
                for s in 0..t {
                    let left = xibar(p, s);
                    let idx = p.get().pow(t - s) - 1;
                    let right = ThomMonomial::gen(make(idx), p.get().pow(s));
                    for (m, &c) in left.terms() {
                        out.add_term(m.clone(), right.clone(), c as i64);
                    }
                }
            } else {
                out.add_term(MilnorMonomial::unit(), ThomMonomial::gen(g, 1), 1);
            }
        }
        (ThomAlgebra::PhMsu, CoGen::Y(_)) => {
            out.add_term(MilnorMonomial::unit(), ThomMonomial::gen(g, 1), 1);
        }
        (ThomAlgebra::APrimeTensorPh, CoGen::Y(_)) => {
            out.add_term(MilnorMonomial::unit(), ThomMonomial::gen(g, 1), 1);
        }
        (ThomAlgebra::APrimeTensorPh, CoGen::Xi(i)) => {
            // rho = Delta' (x) 1 on the A' factor.
            let gen =
                DualElement::single(p, Ambient::APrime, MilnorMonomial::xi_gen(i as usize, 1), 1)
                    .unwrap();
            for ((l, r), &c) in coproduct(&gen).terms() {
                let mut right = ThomMonomial::unit();
                for (j, e) in r.xi.iter() {
                    right = right.mul(&ThomMonomial::gen(CoGen::Xi(j as u32), e));
                }
                out.add_term(l.clone(), right, c as i64);
            }
        }
        _ => unreachable!("generator validated before dispatch"),
    }
    out
}

/// `t` with `n = p^t - 1`, if any.
fn p_power_exponent(p: Prime, n: u32) -> Option<u32> {
    let mut pt = p.get() as u64;
    let mut t = 1u32;
    loop {
        match (pt - 1).cmp(&(n as u64)) {
            std::cmp::Ordering::Equal => return Some(t),
            std::cmp::Ordering::Greater => return None,
            std::cmp::Ordering::Less => {
                pt *= p.get() as u64;
                t += 1;
            }
        }
    }
}

/// Coaction of a single monomial, multiplicatively.
pub fn coaction_monomial(
    p: Prime,
    algebra: ThomAlgebra,
    m: &ThomMonomial,
) -> Result<CoactionTensor> {
    p.require_odd()?;
    if !m.valid_for(p, algebra) {
        return Err(Error::Invalid(format!(
            "monomial `{m}` is not valid in {algebra}"
        )));
    }
    let mut acc = CoactionTensor::unit(p, algebra);
    for &(g, e) in m.factors() {
        acc = acc.mul(&coaction_gen(p, algebra, g).pow(e));
    }
    Ok(acc)
}

/// Coaction of a polynomial in its own algebra.
pub fn coaction(x: &ComodulePoly) -> Result<CoactionTensor> {
    let mut out = CoactionTensor::zero(x.p(), x.algebra());
    for (m, &c) in x.terms() {
        let mut t = coaction_monomial(x.p(), x.algebra(), m)?;
        t.scale(c as i64);
        out.add(&t);
    }
    Ok(out)
}

/// Coaction on `H_*(MSU)`.
pub fn coaction_msu(x: &ComodulePoly) -> Result<CoactionTensor> {
    if x.algebra() != ThomAlgebra::Msu {
        return Err(Error::AmbientMismatch(
            x.algebra().to_string(),
            ThomAlgebra::Msu.to_string(),
        ));
    }
    coaction(x)
}

/// Coaction on `H_*(MU)`.
pub fn coaction_mu(x: &ComodulePoly) -> Result<CoactionTensor> {
    if x.algebra() != ThomAlgebra::Mu {
        return Err(Error::AmbientMismatch(
            x.algebra().to_string(),
            ThomAlgebra::Mu.to_string(),
        ));
    }
    coaction(x)
}

/// All monomials of exact degree `t` in the given algebra, sorted. (`t` is
/// the internal/topological degree; generators sit in even degrees, so odd
/// `t` yields an empty list.)
pub fn monomial_basis(p: Prime, algebra: ThomAlgebra, t: u64) -> Result<Vec<ThomMonomial>> {
    p.require_odd()?;
    // Generators of degree <= t, descending, for recursive enumeration.
    let mut gens: Vec<CoGen> = Vec::new();
    match algebra {
        ThomAlgebra::Mu => {
            for n in 1..=(t / 2) as u32 {
                gens.push(CoGen::Z(n));
            }
        }
        ThomAlgebra::Msu | ThomAlgebra::PhMsu => {
            for n in 2..=(t / 2) as u32 {
                gens.push(CoGen::Y(n));
            }
        }
        ThomAlgebra::APrimeTensorPh => {
            let mut i = 1u32;
            while 2 * ((p.get() as u64).pow(i) - 1) <= t {
                gens.push(CoGen::Xi(i));
                i += 1;
            }
            for n in 2..=(t / 2) as u32 {
                gens.push(CoGen::Y(n));
            }
        }
    }
    gens.retain(|g| g.valid_for(p, algebra));
    let mut out = Vec::new();
    let mut stack: Vec<(CoGen, u32)> = Vec::new();
    fn rec(
        p: Prime,
        gens: &[CoGen],
        i: usize,
        remaining: u64,
        stack: &mut Vec<(CoGen, u32)>,
        out: &mut Vec<ThomMonomial>,
    ) {
        if remaining == 0 {
            let mut factors = stack.clone();
            factors.sort();
            out.push(ThomMonomial(factors));
            return;
        }
        if i == gens.len() {
            return;
        }
        let d = gens[i].degree(p);
        let max_e = remaining / d;
        for e in (0..=max_e).rev() {
            if e > 0 {
                stack.push((gens[i], e as u32));
            }
            rec(p, gens, i + 1, remaining - e * d, stack, out);
            if e > 0 {
                stack.pop();
            }
        }
    }
    rec(p, &gens, 0, t, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

/// Monomial basis of `PH` in degree `t`, each as a one-term polynomial.
pub fn primitives(p: Prime, t: u64) -> Result<Vec<ComodulePoly>> {
    monomial_basis(p, ThomAlgebra::PhMsu, t)?
        .into_iter()
        .map(|m| ComodulePoly::single(p, ThomAlgebra::PhMsu, m, 1))
        .collect()
}

/// The splitting `G: H_*(MSU) -> A' (x) PH`, an algebra map with
/// `G(Y_{p^t-1}) = -xibar_t (x) 1` and `G(Y_n) = 1 (x) Y_n` otherwise.
pub fn splitting_g(x: &ComodulePoly) -> Result<ComodulePoly> {
    if x.algebra() != ThomAlgebra::Msu {
        return Err(Error::AmbientMismatch(
            x.algebra().to_string(),
            ThomAlgebra::Msu.to_string(),
        ));
    }
    let p = x.p();
    p.require_odd()?;
    let mut out = ComodulePoly::zero(p, ThomAlgebra::APrimeTensorPh);
    for (m, &c) in x.terms() {
        let mut acc = ComodulePoly::unit(p, ThomAlgebra::APrimeTensorPh);
        for &(g, e) in m.factors() {
            let CoGen::Y(n) = g else { unreachable!() };
            let image = if let Some(t) = p_power_exponent(p, n) {
                let mut xb = xibar(p, t);
                xb.scale(-1);
                aprime_as_poly(&xb, ThomAlgebra::APrimeTensorPh)?
            } else {
                ComodulePoly::single(
                    p,
                    ThomAlgebra::APrimeTensorPh,
                    ThomMonomial::gen(CoGen::Y(n), 1),
                    1,
                )?
            };
            acc = acc.mul(&image.pow(e)?)?;
        }
        acc.scale(c as i64);
        out.add(&acc)?;
    }
    Ok(out)
}

/// Per-degree result of the `G` checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GDegreeCheck {
    pub t: u64,
    pub dim_msu: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub comodule_ok: bool,
}

/// Report of [`verify_g_iso`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GIsoReport {
    pub p: u32,
    pub t_max: u64,
    pub all_ok: bool,
    pub degrees: Vec<GDegreeCheck>,
    pub first_failure: Option<u64>,
}

impl GIsoReport {
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "t_max": self.t_max,
            "all_ok": self.all_ok,
            "first_failure": self.first_failure,
            "degrees": self.degrees.iter().map(|d| json!({
                "t": d.t,
                "dim_msu": d.dim_msu,
                "dim_target": d.dim_target,
                "rank": d.rank,
                "comodule_ok": d.comodule_ok,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Checks, for every even degree `t <= t_max`, that `G` is a degreewise
/// bijection `H_t(MSU) -> (A' (x) PH)_t` and strictly a comodule map:
/// `(Delta' (x) 1)(G m) = (1 (x) G)(rho m)` for every basis monomial `m`.
pub fn verify_g_iso(p: Prime, t_max: u64) -> Result<GIsoReport> {
    p.require_odd()?;
    let mut degrees = Vec::new();
    let mut first_failure = None;
    for t in (0..=t_max).step_by(2) {
        let source = monomial_basis(p, ThomAlgebra::Msu, t)?;
        let target = monomial_basis(p, ThomAlgebra::APrimeTensorPh, t)?;
        let index: BTreeMap<&ThomMonomial, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // Matrix of G on the degree-t slice.
        let mut matrix = crate::fp::FpMatrix::new(p, target.len(), source.len());
        let mut comodule_ok = true;
        for (j, m) in source.iter().enumerate() {
            let x = ComodulePoly::single(p, ThomAlgebra::Msu, m.clone(), 1)?;
            let gx = splitting_g(&x)?;
            for (mono, &c) in gx.terms() {
                let i = *index
                    .get(mono)
                    .ok_or_else(|| Error::Invalid(format!("G image `{mono}` missed the basis")))?;
                matrix.add_entry(i, j, c as i64);
            }
            // Comodule compatibility on this monomial.
            let lhs = coaction(&gx)?;
            let rho = coaction_msu(&x)?;
            let mut rhs = CoactionTensor::zero(p, ThomAlgebra::APrimeTensorPh);
            for ((l, r), &c) in rho.terms() {
                let gr = splitting_g(&ComodulePoly::single(p, ThomAlgebra::Msu, r.clone(), 1)?)?;
                for (mono, &c2) in gr.terms() {
                    rhs.add_term(l.clone(), mono.clone(), p.mul(c, c2) as i64);
                }
            }
            if lhs != rhs {
                comodule_ok = false;
            }
        }
        let rank = matrix.rank();
        let check = GDegreeCheck {
            t,
            dim_msu: source.len(),
            dim_target: target.len(),
            rank,
            comodule_ok,
        };
        let ok = check.dim_msu == check.dim_target && rank == check.dim_msu && comodule_ok;
        if !ok && first_failure.is_none() {
            first_failure = Some(t);
        }
        degrees.push(check);
    }
    Ok(GIsoReport {
        p: p.get(),
        t_max,
        all_ok: first_failure.is_none(),
        degrees,
        first_failure,
    })
}

/// The standard map `H_*(MSU) -> H_*(MU)`: `Y_n -> z_n` for `n != p^t`,
/// `Y_{p^t} -> z_{p^{t-1}}^p`.
pub fn mu_inclusion(x: &ComodulePoly) -> Result<ComodulePoly> {
    if x.algebra() != ThomAlgebra::Msu {
        return Err(Error::AmbientMismatch(
            x.algebra().to_string(),
            ThomAlgebra::Msu.to_string(),
        ));
    }
    let p = x.p();
    p.require_odd()?;
    let mut out = ComodulePoly::zero(p, ThomAlgebra::Mu);
    for (m, &c) in x.terms() {
        let mut mono = ThomMonomial::unit();
        for &(g, e) in m.factors() {
            let CoGen::Y(n) = g else { unreachable!() };
            let image = if let Some(t) = p_power_exponent_exact(p, n) {
                ThomMonomial::gen(CoGen::Z(p.get().pow(t - 1)), p.get() * e)
            } else {
                ThomMonomial::gen(CoGen::Z(n), e)
            };
            mono = mono.mul(&image);
        }
        out.add_term(mono, c as i64)?;
    }
    Ok(out)
}

/// `t >= 1` with `n = p^t`, if any.
fn p_power_exponent_exact(p: Prime, n: u32) -> Option<u32> {
    let mut pt = p.get() as u64;
    let mut t = 1u32;
    loop {
        match pt.cmp(&(n as u64)) {
            std::cmp::Ordering::Equal => return Some(t),
            std::cmp::Ordering::Greater => return None,
            std::cmp::Ordering::Less => {
                pt *= p.get() as u64;
                t += 1;
            }
        }
    }
}

/// Membership of an `H_*(MU)` class in the image of `H_*(MSU)`, with a
/// preimage witness when one exists. The input may be inhomogeneous; each
/// degree is solved separately.
pub fn is_in_msu(x: &ComodulePoly) -> Result<(bool, Option<ComodulePoly>)> {
    if x.algebra() != ThomAlgebra::Mu {
        return Err(Error::AmbientMismatch(
            x.algebra().to_string(),
            ThomAlgebra::Mu.to_string(),
        ));
    }
    let p = x.p();
    p.require_odd()?;
    let mut degrees: BTreeMap<u64, Vec<(&ThomMonomial, u32)>> = BTreeMap::new();
    for (m, &c) in x.terms() {
        degrees.entry(m.degree(p)).or_default().push((m, c));
    }
    let mut witness = ComodulePoly::zero(p, ThomAlgebra::Msu);
    for (t, target_terms) in degrees {
        let source = monomial_basis(p, ThomAlgebra::Msu, t)?;
        // Collect the MU monomials spanned by the images.
        let mut images: Vec<ComodulePoly> = Vec::with_capacity(source.len());
        let mut mu_index: BTreeMap<ThomMonomial, usize> = BTreeMap::new();
        for m in &source {
            let img = mu_inclusion(&ComodulePoly::single(p, ThomAlgebra::Msu, m.clone(), 1)?)?;
            for mono in img.terms().keys() {
                let next = mu_index.len();
                mu_index.entry(mono.clone()).or_insert(next);
            }
            images.push(img);
        }
        for (m, _) in &target_terms {
            let next = mu_index.len();
            mu_index.entry((*m).clone()).or_insert(next);
        }
        let mut matrix = crate::fp::FpMatrix::new(p, mu_index.len(), source.len());
        for (j, img) in images.iter().enumerate() {
            for (mono, &c) in img.terms() {
                matrix.add_entry(mu_index[mono], j, c as i64);
            }
        }
        let mut rhs = vec![0u32; mu_index.len()];
        for (m, c) in target_terms {
            rhs[mu_index[m]] = c;
        }
        match matrix.solve(&rhs) {
            None => return Ok((false, None)),
            Some(sol) => {
                for (j, &c) in sol.iter().enumerate() {
                    if c != 0 {
                        witness.add_term(source[j].clone(), c as i64)?;
                    }
                }
            }
        }
    }
    Ok((true, Some(witness)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn y(n: u32, e: u32) -> ThomMonomial {
        ThomMonomial::gen(CoGen::Y(n), e)
    }

    fn msu(pr: Prime, terms: &[(i64, ThomMonomial)]) -> ComodulePoly {
        let mut x = ComodulePoly::zero(pr, ThomAlgebra::Msu);
        for (c, m) in terms {
            x.add_term(m.clone(), *c).unwrap();
        }
        x
    }

    #[test]
    fn generator_validity() {
        let p3 = p(3);
        assert!(CoGen::Z(1).valid_for(p3, ThomAlgebra::Mu));
        assert!(!CoGen::Y(1).valid_for(p3, ThomAlgebra::Msu));
        assert!(CoGen::Y(2).valid_for(p3, ThomAlgebra::Msu));
        // PH omits Y_2, Y_8, Y_26 at p = 3 but keeps everything else.
        assert!(!CoGen::Y(2).valid_for(p3, ThomAlgebra::PhMsu));
        assert!(!CoGen::Y(8).valid_for(p3, ThomAlgebra::PhMsu));
        assert!(!CoGen::Y(26).valid_for(p3, ThomAlgebra::PhMsu));
        assert!(CoGen::Y(3).valid_for(p3, ThomAlgebra::PhMsu));
        assert!(CoGen::Y(4).valid_for(p3, ThomAlgebra::PhMsu));
        // At p = 5 the excluded indices move.
        let p5 = p(5);
        assert!(!CoGen::Y(4).valid_for(p5, ThomAlgebra::PhMsu));
        assert!(CoGen::Y(2).valid_for(p5, ThomAlgebra::PhMsu));
    }

    #[test]
    fn basis_counts() {
        let p3 = p(3);
        // H_{2n}(MSU) has dimension = partitions of n into parts >= 2.
        for n in 0..=12u64 {
            assert_eq!(
                monomial_basis(p3, ThomAlgebra::Msu, 2 * n).unwrap().len() as u64,
                crate::fp::partitions_min2(n),
                "degree {}",
                2 * n
            );
        }
        // Odd degrees are empty.
        assert!(monomial_basis(p3, ThomAlgebra::Msu, 7).unwrap().is_empty());
        // MU in degree 2n: all partitions of n.
        assert_eq!(monomial_basis(p3, ThomAlgebra::Mu, 8).unwrap().len(), 5);
        // p = 2 is rejected.
        assert!(monomial_basis(p(2), ThomAlgebra::Msu, 4).is_err());
    }

    #[test]
    fn coaction_on_generators() {
        let p3 = p(3);
        // rho(Y_2) = xi_1 (x) 1 + 1 (x) Y_2 (since -xibar_1 = xi_1).
        let rho = coaction_msu(&msu(p3, &[(1, y(2, 1))])).unwrap();
        let mut expect = CoactionTensor::zero(p3, ThomAlgebra::Msu);
        expect.add_term(MilnorMonomial::xi_gen(1, 1), ThomMonomial::unit(), 1);
        expect.add_term(MilnorMonomial::unit(), y(2, 1), 1);
        assert_eq!(rho, expect);
        // rho(Y_8) = (2 xi_1^4 + xi_2) (x) 1 + 2 xi_1 (x) Y_2^3 + 1 (x) Y_8.
        let rho = coaction_msu(&msu(p3, &[(1, y(8, 1))])).unwrap();
        let mut expect = CoactionTensor::zero(p3, ThomAlgebra::Msu);
        expect.add_term(MilnorMonomial::xi_gen(1, 4), ThomMonomial::unit(), 2);
        expect.add_term(MilnorMonomial::xi_gen(2, 1), ThomMonomial::unit(), 1);
        expect.add_term(MilnorMonomial::xi_gen(1, 1), y(2, 3), 2);
        expect.add_term(MilnorMonomial::unit(), y(8, 1), 1);
        assert_eq!(rho, expect);
        // Y_n for n != p^t - 1 is primitive; Y_2 is not.
        for n in [3u32, 4, 5, 6, 7, 9] {
            let rho = coaction_msu(&msu(p3, &[(1, y(n, 1))])).unwrap();
            assert_eq!(rho.terms().len(), 1, "Y_{n} should be primitive");
        }
    }

    /// Coassociativity of the coaction: (Delta (x) 1) rho = (1 (x) rho) rho.
    fn check_coassoc(pr: Prime, algebra: ThomAlgebra, m: &ThomMonomial) {
        type Triple = BTreeMap<(MilnorMonomial, MilnorMonomial, ThomMonomial), u32>;
        let x = ComodulePoly::single(pr, algebra, m.clone(), 1).unwrap();
        let rho = coaction(&x).unwrap();
        let mut lhs: Triple = BTreeMap::new();
        let mut rhs: Triple = BTreeMap::new();
        for ((a, r), &c) in rho.terms() {
            let da = coproduct(&DualElement::single(pr, Ambient::APrime, a.clone(), 1).unwrap());
            for ((a1, a2), &c2) in da.terms() {
                let slot = lhs.entry((a1.clone(), a2.clone(), r.clone())).or_insert(0);
                *slot = pr.add(*slot, pr.mul(c, c2));
            }
            let rr = coaction(&ComodulePoly::single(pr, algebra, r.clone(), 1).unwrap()).unwrap();
            for ((b, r2), &c2) in rr.terms() {
                let slot = rhs.entry((a.clone(), b.clone(), r2.clone())).or_insert(0);
                *slot = pr.add(*slot, pr.mul(c, c2));
            }
        }
        lhs.retain(|_, v| *v != 0);
        rhs.retain(|_, v| *v != 0);
        assert_eq!(lhs, rhs, "coassociativity on {m} in {algebra}");
    }

    #[test]
    fn coaction_is_counital_and_coassociative() {
        let p3 = p(3);
        for algebra in [
            ThomAlgebra::Mu,
            ThomAlgebra::Msu,
            ThomAlgebra::APrimeTensorPh,
        ] {
            for t in (0..=20u64).step_by(2) {
                for m in monomial_basis(p3, algebra, t).unwrap() {
                    // Counit: the (1, -) part of rho(m) is exactly 1 (x) m.
                    let x = ComodulePoly::single(p3, algebra, m.clone(), 1).unwrap();
                    let rho = coaction(&x).unwrap();
                    let unit_part: Vec<_> = rho
                        .terms()
                        .iter()
                        .filter(|((l, _), _)| l.is_unit())
                        .collect();
                    assert_eq!(unit_part.len(), 1, "counit on {m}");
                    assert_eq!(unit_part[0].0 .1, m);
                    assert_eq!(*unit_part[0].1, 1);
                    check_coassoc(p3, algebra, &m);
                }
            }
        }
    }

    #[test]
    fn coaction_is_multiplicative() {
        let p3 = p(3);
        let a = msu(p3, &[(1, y(2, 1))]);
        let b = msu(p3, &[(1, y(8, 1)), (2, y(2, 4))]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(
            coaction_msu(&ab).unwrap(),
            coaction_msu(&a).unwrap().mul(&coaction_msu(&b).unwrap())
        );
    }

    #[test]
    fn splitting_g_values() {
        let p3 = p(3);
        // G(Y_2) = -xibar_1 (x) 1 = xi_1 (x) 1; G(Y_3) = 1 (x) Y_3.
        let g = splitting_g(&msu(p3, &[(1, y(2, 1))])).unwrap();
        let mut expect = ComodulePoly::zero(p3, ThomAlgebra::APrimeTensorPh);
        expect
            .add_term(ThomMonomial::gen(CoGen::Xi(1), 1), 1)
            .unwrap();
        assert_eq!(g, expect);
        let g = splitting_g(&msu(p3, &[(1, y(3, 1))])).unwrap();
        let mut expect = ComodulePoly::zero(p3, ThomAlgebra::APrimeTensorPh);
        expect.add_term(y(3, 1), 1).unwrap();
        assert_eq!(g, expect);
        // G(Y_8) = -xibar_2 (x) 1 = (2 xi_1^4 + xi_2) (x) 1.
        let g = splitting_g(&msu(p3, &[(1, y(8, 1))])).unwrap();
        let mut expect = ComodulePoly::zero(p3, ThomAlgebra::APrimeTensorPh);
        expect
            .add_term(ThomMonomial::gen(CoGen::Xi(1), 4), 2)
            .unwrap();
        expect
            .add_term(ThomMonomial::gen(CoGen::Xi(2), 1), 1)
            .unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn g_is_iso_through_degree_16() {
        for pr in [p(3), p(5)] {
            let report = verify_g_iso(pr, 16).unwrap();
            assert!(report.all_ok, "{report:?}");
        }
    }

    #[test]
    fn mu_inclusion_values_and_comodule_compat() {
        let p3 = p(3);
        // Y_3 -> z_1^3 (3 = p), Y_9 -> z_3^3 (9 = p^2), Y_4 -> z_4.
        let img = mu_inclusion(&msu(p3, &[(1, y(3, 1))])).unwrap();
        assert_eq!(
            img.terms().keys().collect::<Vec<_>>(),
            vec![&ThomMonomial::gen(CoGen::Z(1), 3)]
        );
        let img = mu_inclusion(&msu(p3, &[(1, y(9, 1))])).unwrap();
        assert_eq!(
            img.terms().keys().collect::<Vec<_>>(),
            vec![&ThomMonomial::gen(CoGen::Z(3), 3)]
        );
        let img = mu_inclusion(&msu(p3, &[(1, y(4, 1))])).unwrap();
        assert_eq!(
            img.terms().keys().collect::<Vec<_>>(),
            vec![&ThomMonomial::gen(CoGen::Z(4), 1)]
        );
        // The inclusion is a comodule map: rho_MU(i(x)) = (1 (x) i)(rho_MSU(x)).
        for t in (0..=16u64).step_by(2) {
            for m in monomial_basis(p3, ThomAlgebra::Msu, t).unwrap() {
                let x = ComodulePoly::single(p3, ThomAlgebra::Msu, m, 1).unwrap();
                let lhs = coaction_mu(&mu_inclusion(&x).unwrap()).unwrap();
                let rho = coaction_msu(&x).unwrap();
                let mut rhs = CoactionTensor::zero(p3, ThomAlgebra::Mu);
                for ((l, r), &c) in rho.terms() {
                    let ir = mu_inclusion(
                        &ComodulePoly::single(p3, ThomAlgebra::Msu, r.clone(), 1).unwrap(),
                    )
                    .unwrap();
                    for (mono, &c2) in ir.terms() {
                        rhs.add_term(l.clone(), mono.clone(), p3.mul(c, c2) as i64);
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn msu_membership() {
        let p3 = p(3);
        // z_2 = image of Y_2; z_3 is not in the image (degree-6 image is
        // spanned by z_1^3); z_1 is not (MSU starts in degree 4).
        let z = |n: u32, e: u32| ThomMonomial::gen(CoGen::Z(n), e);
        let mk = |terms: &[(i64, ThomMonomial)]| {
            let mut x = ComodulePoly::zero(p3, ThomAlgebra::Mu);
            for (c, m) in terms {
                x.add_term(m.clone(), *c).unwrap();
            }
            x
        };
        let (ok, wit) = is_in_msu(&mk(&[(1, z(2, 1))])).unwrap();
        assert!(ok);
        assert_eq!(mu_inclusion(&wit.unwrap()).unwrap(), mk(&[(1, z(2, 1))]));
        let (ok, wit) = is_in_msu(&mk(&[(1, z(3, 1))])).unwrap();
        assert!(!ok && wit.is_none());
        let (ok, _) = is_in_msu(&mk(&[(1, z(1, 1))])).unwrap();
        assert!(!ok);
        // Round trip on an inhomogeneous element.
        let x = msu(p3, &[(2, y(2, 3)), (1, y(4, 1).mul(&y(5, 1)))]);
        let img = mu_inclusion(&x).unwrap();
        let (ok, wit) = is_in_msu(&img).unwrap();
        assert!(ok);
        assert_eq!(mu_inclusion(&wit.unwrap()).unwrap(), img);
    }

    #[test]
    fn json_round_trip() {
        let p3 = p(3);
        let x = msu(p3, &[(2, y(2, 1).mul(&y(8, 2))), (1, y(3, 1))]);
        assert_eq!(ComodulePoly::from_json(&x.to_json()).unwrap(), x);
        // xi generators serialize with negative indices.
        let g = splitting_g(&x).unwrap();
        assert_eq!(ComodulePoly::from_json(&g.to_json()).unwrap(), g);
        // Invalid generators rejected.
        let bad = json!({"p": 3, "algebra": "MSU", "terms": [{"coeff": 1, "exps": [[1, 1]]}]});
        assert!(ComodulePoly::from_json(&bad).is_err());
    }
}
