//! The mod-p Steenrod algebra on the Cartan–Serre admissible basis.
//!
//! At p = 2 the algebra is generated by the squares `Sq^k`; at odd p by the
//! Bockstein `beta` and the powers `P^k`. Products are normalized onto the
//! admissible basis by rewriting the leftmost inadmissible factor with the
//! Adem relations until none remains; the rewrite is confluent, so the
//! result is independent of every other choice.
//!
//! Admissibility:
//! * p = 2: `Sq^{k_1} ... Sq^{k_m}` with `k_i >= 2 k_{i+1}`, all `k_i >= 1`.
//! * p odd: `beta^{e_0} P^{s_1} beta^{e_1} ... P^{s_m} beta^{e_m}` with
//!   `e_i in {0,1}` and `s_i >= p s_{i+1} + e_i`, all `s_i >= 1`.
//!
//! Degrees: `|Sq^k| = k`, `|beta| = 1`, `|P^k| = 2k(p-1)`.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::fp::{binom_mod_p, Prime};
use crate::{Error, Result};

/// A single generator letter in a (possibly inadmissible) word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// `Sq^k`, p = 2 only.
    Sq(u32),
    /// The Bockstein, odd p only.
    Beta,
    /// `P^k`, odd p only.
    P(u32),
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Letter::Sq(k) => write!(f, "Sq{k}"),
            Letter::Beta => write!(f, "b"),
            Letter::P(k) => write!(f, "P{k}"),
        }
    }
}

/// Parses a whitespace-separated word such as `"Sq2 Sq1"` or `"P2 b P1"`.
/// Accepted tokens: `Sq<k>`, `P<k>`, and `b` / `beta` / `B` for the
/// Bockstein.
pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let letter = if let Some(k) = tok.strip_prefix("Sq") {
            Letter::Sq(
                k.parse()
                    .map_err(|_| Error::Invalid(format!("bad exponent in `{tok}`")))?,
            )
        } else if tok == "b" || tok == "B" || tok.eq_ignore_ascii_case("beta") {
            Letter::Beta
        } else if let Some(k) = tok.strip_prefix('P') {
            Letter::P(
                k.parse()
                    .map_err(|_| Error::Invalid(format!("bad exponent in `{tok}`")))?,
            )
        } else {
            return Err(Error::Invalid(format!("unrecognized generator `{tok}`")));
        };
        out.push(letter);
    }
    Ok(out)
}

fn validate_word(p: Prime, word: &[Letter]) -> Result<()> {
    for &l in word {
        match l {
            Letter::Sq(_) if p.is_odd() => {
                return Err(Error::Invalid(format!(
                    "Sq generators are p = 2 only, got p = {p}"
                )));
            }
            Letter::Beta | Letter::P(_) if !p.is_odd() => {
                return Err(Error::Invalid(
                    "beta/P generators require an odd prime".into(),
                ));
            }
            _ => {}
        }
    }
    Ok(())
}

/// An admissible monomial. The unit is `Sq([])` at p = 2 and
/// `OddP { eps: [0], pows: [] }` at odd p.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdmissibleMonomial {
    /// `Sq^{k_1} ... Sq^{k_m}`.
    Sq(Vec<u32>),
    /// `beta^{eps_0} P^{pows_1} beta^{eps_1} ... P^{pows_m} beta^{eps_m}`;
    /// `eps.len() == pows.len() + 1`.
    OddP { eps: Vec<u8>, pows: Vec<u32> },
}

impl AdmissibleMonomial {
    pub fn unit(p: Prime) -> AdmissibleMonomial {
        if p.is_odd() {
            AdmissibleMonomial::OddP {
                eps: vec![0],
                pows: vec![],
            }
        } else {
            AdmissibleMonomial::Sq(vec![])
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            AdmissibleMonomial::Sq(ks) => ks.is_empty(),
            AdmissibleMonomial::OddP { eps, pows } => pows.is_empty() && eps == &[0],
        }
    }

    pub fn degree(&self, p: Prime) -> u64 {
        match self {
            AdmissibleMonomial::Sq(ks) => ks.iter().map(|&k| k as u64).sum(),
            AdmissibleMonomial::OddP { eps, pows } => {
                let e: u64 = eps.iter().map(|&e| e as u64).sum();
                let s: u64 = pows.iter().map(|&s| s as u64).sum();
                e + 2 * s * (p.get() as u64 - 1)
            }
        }
    }

    pub fn to_word(&self) -> Vec<Letter> {
        match self {
            AdmissibleMonomial::Sq(ks) => ks.iter().map(|&k| Letter::Sq(k)).collect(),
            AdmissibleMonomial::OddP { eps, pows } => {
                let mut w = Vec::new();
                if eps[0] == 1 {
                    w.push(Letter::Beta);
                }
                for (i, &s) in pows.iter().enumerate() {
                    w.push(Letter::P(s));
                    if eps[i + 1] == 1 {
                        w.push(Letter::Beta);
                    }
                }
                w
            }
        }
    }

    /// Parses an admissible word into a monomial; `None` if the word is
    /// inadmissible (including `beta beta`) or malformed for the prime.
    fn from_word(p: Prime, word: &[Letter]) -> Option<AdmissibleMonomial> {
        if p.is_odd() {
            let mut eps = vec![0u8];
            let mut pows: Vec<u32> = Vec::new();
            for &l in word {
                match l {
                    Letter::Beta => {
                        let e = eps.last_mut().unwrap();
                        if *e == 1 {
                            return None;
                        }
                        *e = 1;
                    }
                    Letter::P(s) => {
                        if s == 0 {
                            return None;
                        }
                        pows.push(s);
                        eps.push(0);
                    }
                    Letter::Sq(_) => return None,
                }
            }
            let pp = p.get();
            for i in 0..pows.len().saturating_sub(1) {
                if pows[i] < pp * pows[i + 1] + eps[i + 1] as u32 {
                    return None;
                }
            }
            Some(AdmissibleMonomial::OddP { eps, pows })
        } else {
            let mut ks = Vec::new();
            for &l in word {
                match l {
                    Letter::Sq(k) if k >= 1 => ks.push(k),
                    _ => return None,
                }
            }
            for i in 0..ks.len().saturating_sub(1) {
                if ks[i] < 2 * ks[i + 1] {
                    return None;
                }
            }
            Some(AdmissibleMonomial::Sq(ks))
        }
    }
}

impl std::fmt::Display for AdmissibleMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.to_word().iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An element of the Steenrod algebra: an F_p-linear combination of
/// admissible monomials, coefficients reduced and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteenrodElement {
    p: Prime,
    terms: BTreeMap<AdmissibleMonomial, u32>,
}

impl SteenrodElement {
    pub fn zero(p: Prime) -> SteenrodElement {
        SteenrodElement {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: Prime) -> SteenrodElement {
        let mut e = SteenrodElement::zero(p);
        e.add_term(AdmissibleMonomial::unit(p), 1);
        e
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<AdmissibleMonomial, u32> {
        &self.terms
    }

    pub fn add_term(&mut self, m: AdmissibleMonomial, coeff: i64) {
        let c = self.p.reduce(coeff);
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(m).or_insert(0);
        *slot = self.p.add(*slot, c);
        if *slot == 0 {
            // Remove the key we just zeroed.
            let dead: Vec<_> = self
                .terms
                .iter()
                .filter(|&(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&mut self, other: &SteenrodElement) {
        assert_eq!(self.p, other.p);
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c as i64);
        }
    }

    /// Serializes to the interchange form
    /// `{"terms": [{"coeff": c, "sq": [...]}, ...]}` (p = 2) or
    /// `{"terms": [{"coeff": c, "eps": [...], "pows": [...]}, ...]}` (odd p),
    /// terms sorted by degree and then by the structural monomial order.
    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&AdmissibleMonomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.degree(self.p), (*m).clone()));
        let terms: Vec<Value> = keys
            .into_iter()
            .map(|m| {
                let c = self.terms[m];
                match m {
                    AdmissibleMonomial::Sq(ks) => json!({ "coeff": c, "sq": ks }),
                    AdmissibleMonomial::OddP { eps, pows } => {
                        json!({ "coeff": c, "eps": eps, "pows": pows })
                    }
                }
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(p: Prime, v: &Value) -> Result<SteenrodElement> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("expected object with a `terms` array".into()))?;
        let mut out = SteenrodElement::zero(p);
        for t in terms {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Invalid("term missing integer `coeff`".into()))?;
            let mono = if p.is_odd() {
                let eps: Vec<u8> = read_u32_array(t, "eps")?.iter().map(|&x| x as u8).collect();
                let pows = read_u32_array(t, "pows")?;
                if eps.len() != pows.len() + 1 || eps.iter().any(|&e| e > 1) {
                    return Err(Error::Invalid("malformed eps/pows term".into()));
                }
                AdmissibleMonomial::OddP { eps, pows }
            } else {
                AdmissibleMonomial::Sq(read_u32_array(t, "sq")?)
            };
            if AdmissibleMonomial::from_word(p, &mono.to_word()).as_ref() != Some(&mono) {
                return Err(Error::Invalid(format!(
                    "monomial `{mono}` is not admissible"
                )));
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

fn read_u32_array(v: &Value, key: &str) -> Result<Vec<u32>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid(format!("term missing `{key}` array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Invalid(format!("bad entry in `{key}`")))
        })
        .collect()
}

/// All admissible monomials of exact degree `t`, in a deterministic order.
pub fn admissible_basis(p: Prime, t: u64) -> Vec<AdmissibleMonomial> {
    let mut out: Vec<AdmissibleMonomial> = if p.is_odd() {
        let mut memo = HashMap::new();
        let mut res = Vec::new();
        for eps0 in 0..=1u8 {
            if t < eps0 as u64 && eps0 == 1 {
                continue;
            }
            if (eps0 as u64) > t {
                continue;
            }
            for (pows, eps_rest) in p_led_words(p, t - eps0 as u64, &mut memo) {
                let mut eps = vec![eps0];
                eps.extend(eps_rest);
                res.push(AdmissibleMonomial::OddP { eps, pows });
            }
        }
        res
    } else {
        let mut memo = HashMap::new();
        sq_words(t, &mut memo)
            .into_iter()
            .map(AdmissibleMonomial::Sq)
            .collect()
    };
    out.sort();
    out
}

/// Admissible `Sq` sequences of exact degree `t`.
fn sq_words(t: u64, memo: &mut HashMap<u64, Vec<Vec<u32>>>) -> Vec<Vec<u32>> {
    if let Some(v) = memo.get(&t) {
        return v.clone();
    }
    let mut out = Vec::new();
    if t == 0 {
        out.push(vec![]);
    } else {
        for k in 1..=t {
            for tail in sq_words(t - k, memo) {
                if tail.first().map_or(true, |&f| k >= 2 * f as u64) {
                    let mut w = Vec::with_capacity(tail.len() + 1);
                    w.push(k as u32);
                    w.extend(tail);
                    out.push(w);
                }
            }
        }
    }
    memo.insert(t, out.clone());
    out
}

/// Admissible `P^{s_1} beta^{e_1} ...` words (no leading Bockstein) of exact
/// degree `d`, as `(pows, eps_after)` with `eps_after.len() == pows.len()`.
#[allow(clippy::type_complexity)]
fn p_led_words(
    p: Prime,
    d: u64,
    memo: &mut HashMap<u64, Vec<(Vec<u32>, Vec<u8>)>>,
) -> Vec<(Vec<u32>, Vec<u8>)> {
    if let Some(v) = memo.get(&d) {
        return v.clone();
    }
    let q = 2 * (p.get() as u64 - 1);
    let mut out = Vec::new();
    if d == 0 {
        out.push((vec![], vec![]));
    } else {
        for s in 1..=d / q {
            for e in 0..=1u64 {
                let used = s * q + e;
                if used > d {
                    continue;
                }
                for (tail_pows, tail_eps) in p_led_words(p, d - used, memo) {
                    let ok = match tail_pows.first() {
                        Some(&s2) => s >= p.get() as u64 * s2 as u64 + e,
                        None => true,
                    };
                    if ok {
                        let mut pows = Vec::with_capacity(tail_pows.len() + 1);
                        pows.push(s as u32);
                        pows.extend(tail_pows);
                        let mut eps = Vec::with_capacity(tail_eps.len() + 1);
                        eps.push(e as u8);
                        eps.extend(tail_eps);
                        out.push((pows, eps));
                    }
                }
            }
        }
    }
    memo.insert(d, out.clone());
    out
}

/// Adem rewriting engine with a per-instance memo keyed on whole words.
struct Normalizer {
    p: Prime,
    memo: HashMap<Vec<Letter>, BTreeMap<AdmissibleMonomial, u32>>,
}

impl Normalizer {
    fn new(p: Prime) -> Normalizer {
        Normalizer {
            p,
            memo: HashMap::new(),
        }
    }

    fn normalize(&mut self, word: &[Letter]) -> BTreeMap<AdmissibleMonomial, u32> {
        // Unit letters contribute nothing.
        let word: Vec<Letter> = word
            .iter()
            .copied()
            .filter(|l| !matches!(l, Letter::Sq(0) | Letter::P(0)))
            .collect();
        if let Some(hit) = self.memo.get(&word) {
            return hit.clone();
        }
        let result = match self.leftmost_violation(&word) {
            None => {
                let m = AdmissibleMonomial::from_word(self.p, &word)
                    .expect("violation-free word must be admissible");
                let mut t = BTreeMap::new();
                t.insert(m, 1u32);
                t
            }
            Some((i, replacements)) => {
                let mut acc: BTreeMap<AdmissibleMonomial, u32> = BTreeMap::new();
                let span =
                    if matches!(word[i], Letter::P(_)) && word.get(i + 1) == Some(&Letter::Beta) {
                        3
                    } else {
                        2
                    };
                for (coeff, mid) in replacements {
                    if coeff == 0 {
                        continue;
                    }
                    let mut w = word[..i].to_vec();
                    w.extend(mid);
                    w.extend_from_slice(&word[i + span..]);
                    for (m, c) in self.normalize(&w) {
                        let v = self.p.add(*acc.get(&m).unwrap_or(&0), self.p.mul(c, coeff));
                        if v == 0 {
                            acc.remove(&m);
                        } else {
                            acc.insert(m, v);
                        }
                    }
                }
                acc
            }
        };
        self.memo.insert(word, result.clone());
        result
    }

    /// Finds the leftmost Adem violation and the replacement words for the
    /// violating window, as `(coefficient, letters)` pairs.
    #[allow(clippy::type_complexity)]
    fn leftmost_violation(&self, w: &[Letter]) -> Option<(usize, Vec<(u32, Vec<Letter>)>)> {
        let p = self.p;
        let pp = p.get() as i64;
        for i in 0..w.len() {
            match (w[i], w.get(i + 1), w.get(i + 2)) {
                (Letter::Sq(a), Some(&Letter::Sq(b)), _) if a < 2 * b => {
                    // Sq^a Sq^b = sum_c C(b-c-1, a-2c) Sq^{a+b-c} Sq^c, a < 2b.
                    let mut reps = Vec::new();
                    for c in 0..=(a / 2) as i64 {
                        let bin = binom_mod_p(b as i64 - c - 1, a as i64 - 2 * c, p);
                        reps.push((
                            bin,
                            vec![Letter::Sq(a + b - c as u32), Letter::Sq(c as u32)],
                        ));
                    }
                    return Some((i, reps));
                }
                (Letter::Beta, Some(&Letter::Beta), _) => {
                    return Some((i, vec![]));
                }
                (Letter::P(a), Some(&Letter::P(b)), _) if a < p.get() * b => {
                    // P^a P^b = sum_i (-1)^{a+i} C((p-1)(b-i)-1, a-pi) P^{a+b-i} P^i.
                    let (a, b) = (a as i64, b as i64);
                    let mut reps = Vec::new();
                    for t in 0..=a / pp {
                        let bin = binom_mod_p((pp - 1) * (b - t) - 1, a - pp * t, p);
                        let sign = if (a + t) % 2 == 0 { 1 } else { -1 };
                        reps.push((
                            p.reduce(sign * bin as i64),
                            vec![Letter::P((a + b - t) as u32), Letter::P(t as u32)],
                        ));
                    }
                    return Some((i, reps));
                }
                (Letter::P(a), Some(&Letter::Beta), Some(&Letter::P(b))) if a <= p.get() * b => {
                    // P^a beta P^b =
                    //     sum_i (-1)^{a+i} C((p-1)(b-i), a-pi)   beta P^{a+b-i} P^i
                    //   - sum_i (-1)^{a+i} C((p-1)(b-i)-1, a-pi-1)     P^{a+b-i} beta P^i.
                    let (a, b) = (a as i64, b as i64);
                    let mut reps = Vec::new();
                    for t in 0..=a / pp {
                        let bin = binom_mod_p((pp - 1) * (b - t), a - pp * t, p);
                        let sign = if (a + t) % 2 == 0 { 1 } else { -1 };
                        reps.push((
                            p.reduce(sign * bin as i64),
                            vec![
                                Letter::Beta,
                                Letter::P((a + b - t) as u32),
                                Letter::P(t as u32),
                            ],
                        ));
                    }
                    for t in 0..=(a - 1).div_euclid(pp).max(-1) {
                        let bin = binom_mod_p((pp - 1) * (b - t) - 1, a - pp * t - 1, p);
                        let sign = if (a + t) % 2 == 0 { -1 } else { 1 };
                        reps.push((
                            p.reduce(sign * bin as i64),
                            vec![
                                Letter::P((a + b - t) as u32),
                                Letter::Beta,
                                Letter::P(t as u32),
                            ],
                        ));
                    }
                    return Some((i, reps));
                }
                _ => {}
            }
        }
        None
    }
}

/// Normalizes a linear combination of arbitrary words onto the admissible
/// basis. Words may freely contain `Sq^0`/`P^0` (dropped as units) and
/// inadmissible or repeated-Bockstein segments.
pub fn adem_normalize(p: Prime, words: &[(Vec<Letter>, i64)]) -> Result<SteenrodElement> {
    for (w, _) in words {
        validate_word(p, w)?;
    }
    let mut norm = Normalizer::new(p);
    let mut out = SteenrodElement::zero(p);
    for (w, coeff) in words {
        for (m, c) in norm.normalize(w) {
            out.add_term(m, *coeff * c as i64);
        }
    }
    Ok(out)
}

/// Product of two elements, normalized onto the admissible basis.
pub fn product(a: &SteenrodElement, b: &SteenrodElement) -> Result<SteenrodElement> {
    if a.p != b.p {
        return Err(Error::PrimeMismatch(a.p.get(), b.p.get()));
    }
    let p = a.p;
    let mut norm = Normalizer::new(p);
    let mut out = SteenrodElement::zero(p);
    for (ma, &ca) in &a.terms {
        for (mb, &cb) in &b.terms {
            let mut w = ma.to_word();
            w.extend(mb.to_word());
            let coeff = p.mul(ca, cb) as i64;
            for (m, c) in norm.normalize(&w) {
                out.add_term(m, coeff * c as i64);
            }
        }
    }
    Ok(out)
}

/// A polynomial in the generator `x` of `H^*(CP^infinity; F_p)`, as a map
/// from exponents to reduced coefficients.
pub type CpPolynomial = BTreeMap<u64, u32>;

/// Action of an element on `x^n` in `H^*(CP^infinity; F_p)`:
/// `P^k x^n = C(n,k) x^{n + k(p-1)}` (odd p), `Sq^{2k} x^n = C(n,k) x^{n+k}`
/// (p = 2, `|x| = 2`), with the Bockstein and odd squares acting by zero.
pub fn act_cp_infty(op: &SteenrodElement, n: u64) -> CpPolynomial {
    let p = op.p;
    let mut out: CpPolynomial = BTreeMap::new();
    for (m, &coeff) in &op.terms {
        let mut terms: CpPolynomial = BTreeMap::from([(n, coeff)]);
        for &letter in m.to_word().iter().rev() {
            let mut next: CpPolynomial = BTreeMap::new();
            for (&e, &c) in &terms {
                let (e2, c2) = match letter {
                    Letter::Beta => continue,
                    Letter::Sq(k) => {
                        if k % 2 == 1 {
                            continue;
                        }
                        (
                            e + (k / 2) as u64,
                            p.mul(c, binom_mod_p(e as i64, (k / 2) as i64, p)),
                        )
                    }
                    Letter::P(k) => (
                        e + k as u64 * (p.get() as u64 - 1),
                        p.mul(c, binom_mod_p(e as i64, k as i64, p)),
                    ),
                };
                if c2 != 0 {
                    let slot = next.entry(e2).or_insert(0);
                    *slot = p.add(*slot, c2);
                }
            }
            next.retain(|_, v| *v != 0);
            terms = next;
        }
        for (e, c) in terms {
            let slot = out.entry(e).or_insert(0);
            *slot = p.add(*slot, c);
        }
    }
    out.retain(|_, v| *v != 0);
    out
}
