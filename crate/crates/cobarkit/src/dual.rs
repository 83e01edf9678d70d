//! The dual Steenrod algebra in Milnor's form, with its Hopf structure and
//! the quotient Hopf algebras used by the comodule and cobar layers.
//!
//! At an odd prime, `A* = F_p[xi_1, xi_2, ...] (x) Lambda[tau_0, tau_1, ...]`
//! with `|xi_n| = 2(p^n - 1)` and `|tau_n| = 2p^n - 1`; at p = 2,
//! `A* = F_2[xi_1, xi_2, ...]` with `|xi_n| = 2^n - 1`. Coproducts:
//!
//! ```text
//! D(xi_n) = sum_{k=0}^{n} xi_{n-k}^{p^k} (x) xi_k
//! D(tau_n) = tau_n (x) 1 + sum_{k=0}^{n} xi_{n-k}^{p^k} (x) tau_k
//! ```
//!
//! Supported ambients: the full dual, the polynomial quotient
//! `A' = F_p[xi]` (tau := 0), the exterior quotient `A*//A' = Lambda[tau]`
//! (xi := 0), and `Lambda[tau_0]`. Projection kills any monomial containing
//! a generator that the target quotient sets to zero.
//!
//! Conjugates: `xibar = sum_n chi(xi_n)` and `taubar_n = chi(tau_n)`. The
//! degree component `(xibar^k)_t` is available two independent ways — the
//! closed-form coefficient formula of Brown–Davis–Peterson
//! ([`xibar_power_component`]) and direct power-series arithmetic on the
//! antipode series ([`xibar_series_component`]) — and the two are compared
//! in the acceptance suite.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde_json::{json, Value};

use crate::fp::{binom_mod_p, multinom_mod_p, ExpSeq, Prime};
use crate::{Error, Result};

/// Which Hopf algebra a [`DualElement`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ambient {
    Full,
    APrime,
    AModAPrime,
    LambdaTau0,
}

impl Ambient {
    pub fn as_str(self) -> &'static str {
        match self {
            Ambient::Full => "full",
            Ambient::APrime => "A_prime",
            Ambient::AModAPrime => "A_mod_A_prime",
            Ambient::LambdaTau0 => "Lambda_tau0",
        }
    }

    pub fn parse(s: &str) -> Result<Ambient> {
        match s {
            "full" => Ok(Ambient::Full),
            "A_prime" | "a-prime" => Ok(Ambient::APrime),
            "A_mod_A_prime" | "a-mod-a-prime" => Ok(Ambient::AModAPrime),
            "Lambda_tau0" | "lambda-tau0" => Ok(Ambient::LambdaTau0),
            _ => Err(Error::Invalid(format!("unknown ambient `{s}`"))),
        }
    }
}

impl std::fmt::Display for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A monomial `xi^R tau_S`: xi exponents as an [`ExpSeq`] (1-indexed),
/// tau indices strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MilnorMonomial {
    pub xi: ExpSeq,
    pub tau: Vec<u32>,
}

impl MilnorMonomial {
    pub fn unit() -> MilnorMonomial {
        MilnorMonomial::default()
    }

    pub fn xi_gen(n: usize, e: u32) -> MilnorMonomial {
        assert!(n >= 1);
        let mut v = vec![0u32; n];
        v[n - 1] = e;
        MilnorMonomial {
            xi: ExpSeq::new(v),
            tau: vec![],
        }
    }

    pub fn tau_gen(n: u32) -> MilnorMonomial {
        MilnorMonomial {
            xi: ExpSeq::empty(),
            tau: vec![n],
        }
    }

    pub fn is_unit(&self) -> bool {
        self.xi.is_empty() && self.tau.is_empty()
    }

    pub fn degree(&self, p: Prime) -> u64 {
        let pp = p.get() as u64;
        let xi: u64 = self
            .xi
            .iter()
            .map(|(i, r)| {
                let w = if p.is_odd() {
                    2 * (pp.pow(i as u32) - 1)
                } else {
                    pp.pow(i as u32) - 1
                };
                w * r as u64
            })
            .sum();
        let tau: u64 = self.tau.iter().map(|&i| 2 * pp.pow(i) - 1).sum();
        xi + tau
    }

    /// Parity of the monomial (tau count mod 2); the xi's are even.
    pub fn parity(&self) -> u32 {
        (self.tau.len() % 2) as u32
    }

    /// Whether the monomial survives projection to `target`.
    pub fn lives_in(&self, target: Ambient) -> bool {
        match target {
            Ambient::Full => true,
            Ambient::APrime => self.tau.is_empty(),
            Ambient::AModAPrime => self.xi.is_empty(),
            Ambient::LambdaTau0 => self.xi.is_empty() && self.tau.iter().all(|&i| i == 0),
        }
    }

    /// Product with Koszul sign from interleaving the tau factors; `None`
    /// when a tau index repeats (square-zero).
    pub fn mul(&self, other: &MilnorMonomial, p: Prime) -> Option<(MilnorMonomial, u32)> {
        // Count inversions: pairs (s in self.tau, t in other.tau) with s > t.
        let mut inversions = 0u32;
        for &s in &self.tau {
            for &t in &other.tau {
                if s == t {
                    return None;
                }
                if s > t {
                    inversions += 1;
                }
            }
        }
        let mut tau: Vec<u32> = self.tau.iter().chain(other.tau.iter()).copied().collect();
        tau.sort_unstable();
        let sign = if inversions % 2 == 0 { 1 } else { p.neg(1) };
        Some((
            MilnorMonomial {
                xi: self.xi.plus(&other.xi),
                tau,
            },
            sign,
        ))
    }

    pub fn to_json(&self) -> Value {
        json!({ "xi": self.xi.as_slice(), "tau": self.tau })
    }

    pub fn from_json(v: &Value) -> Result<MilnorMonomial> {
        let xi = read_u32s(v, "xi")?;
        let tau = read_u32s(v, "tau")?;
        let mono = MilnorMonomial {
            xi: ExpSeq::new(xi),
            tau: tau.clone(),
        };
        if tau.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(
                "tau indices must be strictly increasing".into(),
            ));
        }
        Ok(mono)
    }
}

fn read_u32s(v: &Value, key: &str) -> Result<Vec<u32>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid(format!("monomial missing `{key}` array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Invalid(format!("bad entry in `{key}`")))
        })
        .collect()
}

impl std::fmt::Display for MilnorMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (i, r) in self.xi.iter() {
            if r == 1 {
                parts.push(format!("xi{i}"));
            } else {
                parts.push(format!("xi{i}^{r}"));
            }
        }
        for &i in &self.tau {
            parts.push(format!("tau{i}"));
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// An element of the (possibly quotient) dual Hopf algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualElement {
    p: Prime,
    ambient: Ambient,
    terms: BTreeMap<MilnorMonomial, u32>,
}

impl DualElement {
    pub fn zero(p: Prime, ambient: Ambient) -> DualElement {
        DualElement {
            p,
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: Prime, ambient: Ambient) -> DualElement {
        let mut e = DualElement::zero(p, ambient);
        e.add_term(MilnorMonomial::unit(), 1);
        e
    }

    pub fn single(
        p: Prime,
        ambient: Ambient,
        m: MilnorMonomial,
        coeff: i64,
    ) -> Result<DualElement> {
        if !m.lives_in(ambient) {
            return Err(Error::Invalid(format!(
                "monomial `{m}` is not in ambient {ambient}"
            )));
        }
        if !p.is_odd() && !m.tau.is_empty() {
            return Err(Error::OddPrimeRequired(p.get()));
        }
        let mut e = DualElement::zero(p, ambient);
        e.add_term(m, coeff);
        Ok(e)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<MilnorMonomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: MilnorMonomial, coeff: i64) {
        let c = self.p.reduce(coeff);
        if c == 0 {
            return;
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
    }

    pub fn add(&mut self, other: &DualElement) {
        assert_eq!((self.p, self.ambient), (other.p, other.ambient));
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c as i64);
        }
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

    /// Graded-commutative product.
    pub fn mul(&self, other: &DualElement) -> Result<DualElement> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(
                self.ambient.to_string(),
                other.ambient.to_string(),
            ));
        }
        let mut out = DualElement::zero(self.p, self.ambient);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb, self.p) {
                    out.add_term(m, (self.p.mul(self.p.mul(ca, cb), sign)) as i64);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<DualElement> {
        let mut acc = DualElement::unit(self.p, self.ambient);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `x^(p^k)` for xi-only elements, by termwise Frobenius.
    pub fn frobenius_pow(&self, k: u32) -> DualElement {
        debug_assert!(self.terms.keys().all(|m| m.tau.is_empty()));
        let pk = self.p.get().pow(k);
        let mut out = DualElement::zero(self.p, self.ambient);
        for (m, &c) in &self.terms {
            let xi = ExpSeq::new(m.xi.as_slice().iter().map(|&r| r * pk).collect());
            // c^(p^k) = c by Fermat.
            out.add_term(MilnorMonomial { xi, tau: vec![] }, c as i64);
        }
        out
    }

    /// Coefficient of the unit monomial.
    pub fn counit(&self) -> u32 {
        self.terms
            .get(&MilnorMonomial::unit())
            .copied()
            .unwrap_or(0)
    }

    /// The part of the element in a single internal degree.
    pub fn degree_component(&self, t: u64) -> DualElement {
        let mut out = DualElement::zero(self.p, self.ambient);
        for (m, &c) in &self.terms {
            if m.degree(self.p) == t {
                out.add_term(m.clone(), c as i64);
            }
        }
        out
    }

    /// Projects onto a quotient Hopf algebra, killing monomials that
    /// involve a generator the target sets to zero.
    pub fn project(&self, target: Ambient) -> DualElement {
        let mut out = DualElement::zero(self.p, target);
        for (m, &c) in &self.terms {
            if m.lives_in(target) {
                out.add_term(m.clone(), c as i64);
            }
        }
        out
    }

    /// Serializes as `{"p": ..., "ambient": ..., "terms": [...]}` with terms
    /// sorted by degree and then by the structural monomial order.
    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&MilnorMonomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.degree(self.p), (*m).clone()));
        let terms: Vec<Value> = keys
            .into_iter()
            .map(|m| json!({ "coeff": self.terms[m], "xi": m.xi.as_slice(), "tau": m.tau }))
            .collect();
        json!({ "p": self.p.get(), "ambient": self.ambient.as_str(), "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<DualElement> {
        let p = Prime::new(
            v.get("p")
                .and_then(Value::as_u64)
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Invalid("element missing prime `p`".into()))?,
        )?;
        let ambient = Ambient::parse(
            v.get("ambient")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Invalid("element missing `ambient`".into()))?,
        )?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("element missing `terms` array".into()))?;
        let mut out = DualElement::zero(p, ambient);
        for t in terms {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Invalid("term missing integer `coeff`".into()))?;
            let m = MilnorMonomial::from_json(t)?;
            if !m.lives_in(ambient) {
                return Err(Error::Invalid(format!(
                    "monomial `{m}` is not in ambient {ambient}"
                )));
            }
            if !p.is_odd() && !m.tau.is_empty() {
                return Err(Error::OddPrimeRequired(p.get()));
            }
            out.add_term(m, coeff);
        }
        Ok(out)
    }
}

/// A two-fold tensor of dual elements (both factors in the same ambient),
/// multiplied with the Koszul rule
/// `(a (x) b)(c (x) d) = (-1)^(|b||c|) ac (x) bd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    p: Prime,
    ambient: Ambient,
    terms: BTreeMap<(MilnorMonomial, MilnorMonomial), u32>,
}

impl TensorElement {
    pub fn zero(p: Prime, ambient: Ambient) -> TensorElement {
        TensorElement {
            p,
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: Prime, ambient: Ambient) -> TensorElement {
        let mut t = TensorElement::zero(p, ambient);
        t.add_term(MilnorMonomial::unit(), MilnorMonomial::unit(), 1);
        t
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<(MilnorMonomial, MilnorMonomial), u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, left: MilnorMonomial, right: MilnorMonomial, coeff: i64) {
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

    pub fn add(&mut self, other: &TensorElement) {
        assert_eq!((self.p, self.ambient), (other.p, other.ambient));
        for ((l, r), &c) in &other.terms {
            self.add_term(l.clone(), r.clone(), c as i64);
        }
    }

    pub fn mul(&self, other: &TensorElement) -> Result<TensorElement> {
        if (self.p, self.ambient) != (other.p, other.ambient) {
            return Err(Error::AmbientMismatch(
                format!("{} at p={}", self.ambient, self.p),
                format!("{} at p={}", other.ambient, other.p),
            ));
        }
        let p = self.p;
        let mut out = TensorElement::zero(p, self.ambient);
        for ((la, ra), &ca) in &self.terms {
            for ((lb, rb), &cb) in &other.terms {
                let Some((l, sl)) = la.mul(lb, p) else {
                    continue;
                };
                let Some((r, sr)) = ra.mul(rb, p) else {
                    continue;
                };
                // Koszul: ra passes lb.
                let koszul = if ra.parity() * lb.parity() % 2 == 1 {
                    p.neg(1)
                } else {
                    1
                };
                let coeff = [ca, cb, sl, sr, koszul]
                    .into_iter()
                    .fold(1u32, |acc, x| p.mul(acc, x));
                out.add_term(l, r, coeff as i64);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<TensorElement> {
        let mut acc = TensorElement::unit(self.p, self.ambient);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Projects both tensor factors to a quotient ambient.
    pub fn project(&self, target: Ambient) -> TensorElement {
        let mut out = TensorElement::zero(self.p, target);
        for ((l, r), &c) in &self.terms {
            if l.lives_in(target) && r.lives_in(target) {
                out.add_term(l.clone(), r.clone(), c as i64);
            }
        }
        out
    }

    /// Serializes as `{"p":…,"ambient":…,"terms":[{"coeff":…,"left":…,"right":…}]}`.
    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&(MilnorMonomial, MilnorMonomial)> = self.terms.keys().collect();
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
        json!({ "p": self.p.get(), "ambient": self.ambient.as_str(), "terms": terms })
    }
}

/// Coproduct of a single monomial in the **full** dual, as the product of
/// the generator coproducts.
fn coproduct_monomial_full(p: Prime, m: &MilnorMonomial) -> TensorElement {
    let mut acc = TensorElement::unit(p, Ambient::Full);
    for (i, r) in m.xi.iter() {
        let d = coproduct_xi(p, i as u32);
        acc = acc.mul(&d.pow(r).unwrap()).unwrap();
    }
    for &i in &m.tau {
        acc = acc.mul(&coproduct_tau(p, i)).unwrap();
    }
    acc
}

fn coproduct_xi(p: Prime, n: u32) -> TensorElement {
    let mut t = TensorElement::zero(p, Ambient::Full);
    for k in 0..=n {
        let left = if n == k {
            MilnorMonomial::unit()
        } else {
            MilnorMonomial::xi_gen((n - k) as usize, p.get().pow(k))
        };
        let right = if k == 0 {
            MilnorMonomial::unit()
        } else {
            MilnorMonomial::xi_gen(k as usize, 1)
        };
        t.add_term(left, right, 1);
    }
    t
}

fn coproduct_tau(p: Prime, n: u32) -> TensorElement {
    let mut t = TensorElement::zero(p, Ambient::Full);
    t.add_term(MilnorMonomial::tau_gen(n), MilnorMonomial::unit(), 1);
    for k in 0..=n {
        let left = if n == k {
            MilnorMonomial::unit()
        } else {
            MilnorMonomial::xi_gen((n - k) as usize, p.get().pow(k))
        };
        t.add_term(left, MilnorMonomial::tau_gen(k), 1);
    }
    t
}

/// Coproduct. For quotient ambients this is the induced coproduct: compute
/// in the full dual and project both factors.
pub fn coproduct(x: &DualElement) -> TensorElement {
    let p = x.p();
    let mut acc = TensorElement::zero(p, Ambient::Full);
    for (m, &c) in x.terms() {
        let mut d = coproduct_monomial_full(p, m);
        for v in d.terms.values_mut() {
            *v = p.mul(*v, c);
        }
        acc.add(&d);
    }
    if x.ambient() == Ambient::Full {
        acc
    } else {
        acc.project(x.ambient())
    }
}

static ANTIPODE_MEMO: OnceLock<Mutex<BTreeMap<(u32, bool, u32), BTreeMap<MilnorMonomial, u32>>>> =
    OnceLock::new();

/// Antipode of `xi_n` (is_tau = false) or `tau_n` (is_tau = true), memoized.
///
/// Recursions forced by `m (S (x) 1) D = eta eps`:
/// `S(xi_n) = -sum_{k=1}^{n} S(xi_{n-k})^(p^k) xi_k` and
/// `S(tau_n) = -sum_{k=0}^{n} S(xi_{n-k})^(p^k) tau_k`.
fn antipode_gen(p: Prime, is_tau: bool, n: u32) -> DualElement {
    let key = (p.get(), is_tau, n);
    if let Some(hit) = ANTIPODE_MEMO
        .get_or_init(|| Mutex::new(BTreeMap::new()))
        .lock()
        .unwrap()
        .get(&key)
    {
        let mut e = DualElement::zero(p, Ambient::Full);
        for (m, &c) in hit {
            e.add_term(m.clone(), c as i64);
        }
        return e;
    }
    let mut acc = DualElement::zero(p, Ambient::Full);
    if !is_tau && n == 0 {
        acc = DualElement::unit(p, Ambient::Full);
    } else {
        let lo = if is_tau { 0 } else { 1 };
        for k in lo..=n {
            let factor = antipode_gen(p, false, n - k).frobenius_pow(k);
            let gen = if is_tau {
                DualElement::single(p, Ambient::Full, MilnorMonomial::tau_gen(k), 1).unwrap()
            } else {
                DualElement::single(p, Ambient::Full, MilnorMonomial::xi_gen(k as usize, 1), 1)
                    .unwrap()
            };
            let mut term = factor.mul(&gen).unwrap();
            term.scale(-1);
            acc.add(&term);
        }
    }
    ANTIPODE_MEMO
        .get_or_init(|| Mutex::new(BTreeMap::new()))
        .lock()
        .unwrap()
        .insert(key, acc.terms.clone());
    acc
}

/// Antipode on the full dual. (The antipode descends to the quotients, but
/// only the full form is needed; other ambients are rejected.)
pub fn antipode(x: &DualElement) -> Result<DualElement> {
    if x.ambient() != Ambient::Full {
        return Err(Error::Invalid(
            "antipode is implemented on the full dual only".into(),
        ));
    }
    let p = x.p();
    let mut out = DualElement::zero(p, Ambient::Full);
    for (m, &c) in x.terms() {
        // S is an algebra map here (graded-commutative Hopf algebra), so
        // S(monomial) is the product of generator antipodes.
        let mut acc = DualElement::unit(p, Ambient::Full);
        for (i, r) in m.xi.iter() {
            acc = acc.mul(&antipode_gen(p, false, i as u32).pow(r)?)?;
        }
        for &i in &m.tau {
            acc = acc.mul(&antipode_gen(p, true, i))?;
        }
        acc.scale(c as i64);
        out.add(&acc);
    }
    Ok(out)
}

/// All monomials of exact degree `t` in the given ambient, sorted.
pub fn milnor_basis(p: Prime, t: u64, ambient: Ambient) -> Result<Vec<MilnorMonomial>> {
    if !p.is_odd() && ambient != Ambient::Full {
        return Err(Error::OddPrimeRequired(p.get()));
    }
    let mut out = Vec::new();
    let tau_allowed: Box<dyn Fn(u32) -> bool> = match ambient {
        Ambient::Full | Ambient::AModAPrime => Box::new(|_| true),
        Ambient::APrime => Box::new(|_| false),
        Ambient::LambdaTau0 => Box::new(|i| i == 0),
    };
    let xi_allowed = matches!(ambient, Ambient::Full | Ambient::APrime);
    // Enumerate tau subsets (strictly increasing), then xi parts exactly
    // filling the remaining degree.
    let mut tau_stack: Vec<u32> = Vec::new();
    enumerate_tau(
        p,
        t,
        0,
        &tau_allowed,
        p.is_odd(),
        &mut tau_stack,
        &mut |taus, rem| {
            if !xi_allowed {
                if rem == 0 {
                    out.push(MilnorMonomial {
                        xi: ExpSeq::empty(),
                        tau: taus.to_vec(),
                    });
                }
                return;
            }
            for xi in xi_parts(p, rem) {
                out.push(MilnorMonomial {
                    xi,
                    tau: taus.to_vec(),
                });
            }
        },
    );
    out.sort();
    Ok(out)
}

fn enumerate_tau(
    p: Prime,
    remaining: u64,
    next: u32,
    allowed: &dyn Fn(u32) -> bool,
    odd: bool,
    stack: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32], u64),
) {
    emit(stack, remaining);
    if !odd {
        return;
    }
    let pp = p.get() as u64;
    let mut i = next;
    loop {
        let d = 2 * pp.pow(i) - 1;
        if d > remaining {
            break;
        }
        if allowed(i) {
            stack.push(i);
            enumerate_tau(p, remaining - d, i + 1, allowed, odd, stack, emit);
            stack.pop();
        }
        i += 1;
        // Degrees grow with i, so stop once even the bare generator exceeds
        // the remaining degree; the loop condition above handles it.
        if 2 * pp.pow(i) - 1 > remaining {
            break;
        }
    }
}

/// xi-monomials (as exponent sequences) of exact degree `d`.
fn xi_parts(p: Prime, d: u64) -> Vec<ExpSeq> {
    let pp = p.get() as u64;
    let weight = |i: u32| -> u64 {
        if p.is_odd() {
            2 * (pp.pow(i) - 1)
        } else {
            pp.pow(i) - 1
        }
    };
    let mut max_i = 0u32;
    while weight(max_i + 1) <= d.max(1) && weight(max_i + 1) > 0 {
        if weight(max_i + 1) > d {
            break;
        }
        max_i += 1;
    }
    let mut out = Vec::new();
    let mut exps = vec![0u32; max_i as usize];
    fn rec(
        weight: &dyn Fn(u32) -> u64,
        i: u32,
        d: u64,
        exps: &mut Vec<u32>,
        out: &mut Vec<ExpSeq>,
    ) {
        if i == 0 {
            if d == 0 {
                out.push(ExpSeq::new(exps.clone()));
            }
            return;
        }
        let w = weight(i);
        let max_r = d / w;
        for r in 0..=max_r {
            exps[(i - 1) as usize] = r as u32;
            rec(weight, i - 1, d - r * w, exps, out);
        }
        exps[(i - 1) as usize] = 0;
    }
    rec(&weight, max_i, d, &mut exps, &mut out);
    out
}

/// `c(m)`: the value `p^i - m` for the least `i >= 0` making it positive.
pub fn c_function(m: i64, p: Prime) -> u64 {
    let pp = p.get() as i64;
    let mut pi = 1i64;
    loop {
        if pi - m > 0 {
            return (pi - m) as u64;
        }
        pi = pi
            .checked_mul(pp)
            .expect("c_function argument out of supported range");
    }
}

/// Degree-`t` component of `xibar^k` (`xibar = sum_n chi(xi_n)`), by the
/// closed-form coefficient formula: the coefficient of `xi^R` is
/// `C(c(n(R) + k + 1), e(R)) * (e(R); r_1, r_2, ...)` mod p, where
/// `n(R) = sum r_i (p^i - 1)` and `e(R) = sum r_i`. Exact for every
/// integer `k`, including negative powers. Odd primes only.
pub fn xibar_power_component(p: Prime, k: i64, t: u64) -> Result<DualElement> {
    p.require_odd()?;
    let mut out = DualElement::zero(p, Ambient::APrime);
    if t % 2 == 1 {
        return Ok(out);
    }
    let pp = p.get() as u64;
    for xi in xi_parts(p, t) {
        let n_r: i64 = xi
            .iter()
            .map(|(i, r)| (pp.pow(i as u32) as i64 - 1) * r as i64)
            .sum();
        let e_r = xi.total();
        let c = c_function(n_r + k + 1, p);
        let parts: Vec<u64> = xi.as_slice().iter().map(|&r| r as u64).collect();
        let coeff = p.mul(
            binom_mod_p(c as i64, e_r as i64, p),
            multinom_mod_p(&parts, p),
        );
        out.add_term(MilnorMonomial { xi, tau: vec![] }, coeff as i64);
    }
    Ok(out)
}

/// Degree-`t` component of `xibar^k` by the independent series route:
/// assemble the antipode series `xibar = sum_n S(xi_n)` truncated at
/// degree `t`, then take the k-th power (inverting the series first when
/// `k < 0`). Used to cross-validate [`xibar_power_component`].
pub fn xibar_series_component(p: Prime, k: i64, t: u64) -> Result<DualElement> {
    p.require_odd()?;
    let pp = p.get() as u64;
    // Series by degree, sparse: only generator degrees are occupied.
    let mut series: BTreeMap<u64, DualElement> = BTreeMap::new();
    series.insert(0, DualElement::unit(p, Ambient::APrime));
    let mut n = 1u32;
    loop {
        let d = 2 * (pp.pow(n) - 1);
        if d > t {
            break;
        }
        series.insert(d, antipode_gen(p, false, n).project(Ambient::APrime));
        n += 1;
    }
    let series = if k < 0 {
        series_invert(p, &series, t)
    } else {
        series
    };
    let e = k.unsigned_abs() as u32;
    let powered = series_pow(p, &series, e, t);
    Ok(powered
        .get(&t)
        .cloned()
        .unwrap_or_else(|| DualElement::zero(p, Ambient::APrime)))
}

type Series = BTreeMap<u64, DualElement>;

fn series_mul(p: Prime, a: &Series, b: &Series, tmax: u64) -> Series {
    let mut out: Series = BTreeMap::new();
    for (&da, ea) in a {
        for (&db, eb) in b {
            if da + db > tmax {
                continue;
            }
            let prod = ea.mul(eb).unwrap();
            if prod.is_zero() {
                continue;
            }
            out.entry(da + db)
                .or_insert_with(|| DualElement::zero(p, Ambient::APrime))
                .add(&prod);
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

fn series_pow(p: Prime, a: &Series, e: u32, tmax: u64) -> Series {
    let mut acc: Series = BTreeMap::from([(0, DualElement::unit(p, Ambient::APrime))]);
    for _ in 0..e {
        acc = series_mul(p, &acc, a, tmax);
    }
    acc
}

/// Multiplicative inverse of a series with constant term 1, degree by
/// degree: `T_0 = 1`, `T_d = -sum_{e=1..d} A_e T_{d-e}`.
fn series_invert(p: Prime, a: &Series, tmax: u64) -> Series {
    let mut inv: Series = BTreeMap::from([(0, DualElement::unit(p, Ambient::APrime))]);
    for d in 1..=tmax {
        let mut acc = DualElement::zero(p, Ambient::APrime);
        for (&e, ae) in a.range(1..=d) {
            if let Some(te) = inv.get(&(d - e)) {
                let mut prod = ae.mul(te).unwrap();
                prod.scale(-1);
                acc.add(&prod);
            }
        }
        if !acc.is_zero() {
            inv.insert(d, acc);
        }
    }
    inv
}
