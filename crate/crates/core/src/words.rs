//! Words over an abstract alphabet: shuffle and quasi-shuffle products,
//! deconcatenation coproduct, counit, antipodes and Lyndon words.
//!
//! Linear combinations carry exact rational coefficients and never store a
//! zero entry.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordsError {
    #[error("unsupported alphabet: no pairing for ({0}, {1})")]
    UnsupportedAlphabet(String, String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word<L>(pub Vec<L>);

impl<L: Clone> Word<L> {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<L>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[L] {
        &self.0
    }

    pub fn prefix(&self, j: usize) -> Word<L> {
        Word(self.0[..j].to_vec())
    }

    pub fn suffix(&self, j: usize) -> Word<L> {
        Word(self.0[j..].to_vec())
    }

    pub fn reversed(&self) -> Word<L> {
        Word(self.0.iter().rev().cloned().collect())
    }

    fn prepend(&self, l: &L) -> Word<L> {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l.clone());
        v.extend(self.0.iter().cloned());
        Word(v)
    }

    pub fn concat(&self, other: &Word<L>) -> Word<L> {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }
}

/// Finite rational linear combination of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinComb<L: Ord>(BTreeMap<Word<L>, Q>);

impl<L: Ord + Clone> Default for LinComb<L> {
    fn default() -> Self {
        LinComb(BTreeMap::new())
    }
}

impl<L: Ord + Clone> LinComb<L> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word<L>) -> Self {
        Self::term(w, Q::one())
    }

    pub fn term(w: Word<L>, c: Q) -> Self {
        let mut x = Self::zero();
        x.add_term(w, c);
        x
    }

    pub fn add_term(&mut self, w: Word<L>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<L>, c: &Q) {
        for (w, v) in &other.0 {
            self.add_term(w.clone(), v * c);
        }
    }

    pub fn add(&self, other: &LinComb<L>) -> LinComb<L> {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> LinComb<L> {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn coeff(&self, w: &Word<L>) -> Q {
        self.0.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word<L>, &Q)> {
        self.0.iter()
    }

    /// Bilinear extension of a word product.
    pub fn bilinear<F>(&self, other: &LinComb<L>, mut f: F) -> Result<LinComb<L>, WordsError>
    where
        F: FnMut(&Word<L>, &Word<L>) -> Result<LinComb<L>, WordsError>,
    {
        let mut out = Self::zero();
        for (u, cu) in &self.0 {
            for (v, cv) in &other.0 {
                out.add_scaled(&f(u, v)?, &(cu * cv));
            }
        }
        Ok(out)
    }

    pub fn total_coefficient(&self) -> Q {
        self.0.values().fold(Q::zero(), |a, b| a + b)
    }
}

/// Finite rational linear combination of tensor pairs of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorComb<L: Ord>(BTreeMap<(Word<L>, Word<L>), Q>);

impl<L: Ord + Clone> Default for TensorComb<L> {
    fn default() -> Self {
        TensorComb(BTreeMap::new())
    }
}

impl<L: Ord + Clone> TensorComb<L> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, l: Word<L>, r: Word<L>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry((l, r)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Word<L>, Word<L>), &Q)> {
        self.0.iter()
    }

    pub fn coeff(&self, l: &Word<L>, r: &Word<L>) -> Q {
        self.0.get(&(l.clone(), r.clone())).cloned().unwrap_or_else(Q::zero)
    }

    /// Componentwise product `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
    pub fn product<F>(&self, other: &TensorComb<L>, mut f: F) -> Result<TensorComb<L>, WordsError>
    where
        F: FnMut(&Word<L>, &Word<L>) -> Result<LinComb<L>, WordsError>,
    {
        let mut out = Self::zero();
        for ((a, b), c1) in &self.0 {
            for ((c, d), c2) in &other.0 {
                let left = f(a, c)?;
                let right = f(b, d)?;
                let k = c1 * c2;
                for (wl, cl) in left.iter() {
                    let kl = &k * cl;
                    for (wr, cr) in right.iter() {
                        out.add_term(wl.clone(), wr.clone(), &kl * cr);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Letter merge rule for quasi-shuffle products.
///
/// `Ok(None)` marks the absorbing zero: terms containing the merged letter
/// are dropped. A missing rule is an `UnsupportedAlphabet` error.
pub trait Pairing<L> {
    fn pair(&self, a: &L, b: &L) -> Result<Option<L>, WordsError>;
}

impl<L, F> Pairing<L> for F
where
    F: Fn(&L, &L) -> Result<Option<L>, WordsError>,
{
    fn pair(&self, a: &L, b: &L) -> Result<Option<L>, WordsError> {
        self(a, b)
    }
}

/// Every merge is the absorbing zero; the quasi-shuffle collapses to the shuffle.
#[derive(Clone, Copy, Debug, Default)]
pub struct Absorbing;

impl<L> Pairing<L> for Absorbing {
    fn pair(&self, _: &L, _: &L) -> Result<Option<L>, WordsError> {
        Ok(None)
    }
}

/// Explicit merge table; lookups try both argument orders.
#[derive(Clone, Debug)]
pub struct PairingTable<L: Ord> {
    table: BTreeMap<(L, L), Option<L>>,
}

impl<L: Ord + Clone + fmt::Debug> PairingTable<L> {
    pub fn new() -> Self {
        PairingTable { table: BTreeMap::new() }
    }

    pub fn insert(&mut self, a: L, b: L, merged: Option<L>) {
        self.table.insert((a, b), merged);
    }
}

impl<L: Ord + Clone + fmt::Debug> Default for PairingTable<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: Ord + Clone + fmt::Debug> Pairing<L> for PairingTable<L> {
    fn pair(&self, a: &L, b: &L) -> Result<Option<L>, WordsError> {
        self.table
            .get(&(a.clone(), b.clone()))
            .or_else(|| self.table.get(&(b.clone(), a.clone())))
            .cloned()
            .ok_or_else(|| WordsError::UnsupportedAlphabet(format!("{a:?}"), format!("{b:?}")))
    }
}

/// Interned letter used by the CLI and the test suites: a sorted multiset
/// of base symbols. Single symbols are the ordinary letters; merged letters
/// arise from the free commutative pairing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(Vec<char>);

impl Letter {
    pub fn new(c: char) -> Self {
        Letter(vec![c])
    }

    pub fn symbols(&self) -> &[char] {
        &self.0
    }

    pub fn merge(&self, other: &Letter) -> Letter {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Letter(v)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Free commutative merge `(a, b) -> ab`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MergePairing;

impl Pairing<Letter> for MergePairing {
    fn pair(&self, a: &Letter, b: &Letter) -> Result<Option<Letter>, WordsError> {
        Ok(Some(a.merge(b)))
    }
}

impl Word<Letter> {
    /// Each character is one letter; `""` and `"e"` denote the empty word.
    pub fn parse(s: &str) -> Word<Letter> {
        if s == "e" {
            return Word::empty();
        }
        Word(s.chars().map(Letter::new).collect())
    }
}

impl<L: fmt::Display> fmt::Display for Word<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn push_signed(out: &mut String, first: bool, c: &Q, body: &str) {
    let neg = c.is_negative();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let mag = c.abs();
    if !mag.is_one() {
        if mag.is_integer() {
            out.push_str(&format_rational(&mag));
        } else {
            out.push_str(&format!("({})", format_rational(&mag)));
        }
    }
    out.push_str(body);
}

impl<L: Ord + Clone + fmt::Display> fmt::Display for LinComb<L> {
    /// Longer words first, then lexicographic.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&Word<L>> = self.0.keys().collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut out = String::new();
        for (i, w) in keys.into_iter().enumerate() {
            push_signed(&mut out, i == 0, &self.0[w], &w.to_string());
        }
        f.write_str(&out)
    }
}

impl<L: Ord + Clone + fmt::Display> fmt::Display for TensorComb<L> {
    /// Shorter left factors first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&(Word<L>, Word<L>)> = self.0.keys().collect();
        keys.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.cmp(b)));
        let mut out = String::new();
        for (i, k) in keys.into_iter().enumerate() {
            push_signed(&mut out, i == 0, &self.0[k], &format!("{}⊗{}", k.0, k.1));
        }
        f.write_str(&out)
    }
}

/// Shuffle product by enumerating the positions taken by `u`.
pub fn shuffle<L: Ord + Clone>(u: &Word<L>, v: &Word<L>) -> LinComb<L> {
    let n = u.len() + v.len();
    let mut out = LinComb::zero();
    let mut pos = Vec::with_capacity(u.len());
    enumerate_positions(n, u.len(), 0, &mut pos, &mut |chosen| {
        let mut w = Vec::with_capacity(n);
        let (mut iu, mut iv) = (0, 0);
        let mut c = chosen.iter().peekable();
        for k in 0..n {
            if c.peek() == Some(&&k) {
                c.next();
                w.push(u.0[iu].clone());
                iu += 1;
            } else {
                w.push(v.0[iv].clone());
                iv += 1;
            }
        }
        out.add_term(Word(w), Q::one());
    });
    out
}

fn enumerate_positions(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if acc.len() == k {
        f(acc);
        return;
    }
    let remaining = k - acc.len();
    for p in start..=(n - remaining) {
        acc.push(p);
        enumerate_positions(n, k, p + 1, acc, f);
        acc.pop();
    }
}

/// Shuffle product via the first-letter recursion.
pub fn shuffle_recursive<L: Ord + Clone>(u: &Word<L>, v: &Word<L>) -> LinComb<L> {
    if u.is_empty() {
        return LinComb::word(v.clone());
    }
    if v.is_empty() {
        return LinComb::word(u.clone());
    }
    let mut out = LinComb::zero();
    for (w, c) in shuffle_recursive(&u.suffix(1), v).iter() {
        out.add_term(w.prepend(&u.0[0]), c.clone());
    }
    for (w, c) in shuffle_recursive(u, &v.suffix(1)).iter() {
        out.add_term(w.prepend(&v.0[0]), c.clone());
    }
    out
}

/// Quasi-shuffle product: the shuffle recursion plus the merged first letters,
/// tabulated over suffix pairs.
pub fn quasi_shuffle<L: Ord + Clone>(
    u: &Word<L>,
    v: &Word<L>,
    pairing: &dyn Pairing<L>,
) -> Result<LinComb<L>, WordsError> {
    let (n, m) = (u.len(), v.len());
    // table[i][j] = u[i..] * v[j..]
    let mut table: Vec<Vec<LinComb<L>>> = vec![vec![LinComb::zero(); m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            table[i][j] = if i == n {
                LinComb::word(v.suffix(j))
            } else if j == m {
                LinComb::word(u.suffix(i))
            } else {
                let (a, b) = (&u.0[i], &v.0[j]);
                let mut out = LinComb::zero();
                for (w, c) in table[i + 1][j].iter() {
                    out.add_term(w.prepend(a), c.clone());
                }
                for (w, c) in table[i][j + 1].iter() {
                    out.add_term(w.prepend(b), c.clone());
                }
                if let Some(ab) = pairing.pair(a, b)? {
                    for (w, c) in table[i + 1][j + 1].iter() {
                        out.add_term(w.prepend(&ab), c.clone());
                    }
                }
                out
            };
        }
    }
    Ok(std::mem::take(&mut table[0][0]))
}

/// Deconcatenation: `Δ(l1..lk) = Σ_j (l_{j+1}..l_k) ⊗ (l_1..l_j)`.
pub fn coproduct<L: Ord + Clone>(w: &Word<L>) -> TensorComb<L> {
    let mut out = TensorComb::zero();
    for j in 0..=w.len() {
        out.add_term(w.suffix(j), w.prefix(j), Q::one());
    }
    out
}

pub fn coproduct_lin<L: Ord + Clone>(x: &LinComb<L>) -> TensorComb<L> {
    let mut out = TensorComb::zero();
    for (w, c) in x.iter() {
        for ((l, r), d) in coproduct(w).iter() {
            out.add_term(l.clone(), r.clone(), c * d);
        }
    }
    out
}

pub fn counit<L: Ord + Clone>(x: &LinComb<L>) -> Q {
    x.coeff(&Word::empty())
}

pub fn antipode_shuffle<L: Ord + Clone>(w: &Word<L>) -> LinComb<L> {
    let sign = if w.len().is_multiple_of(2) { Q::one() } else { -Q::one() };
    LinComb::term(w.reversed(), sign)
}

/// Recursive antipode for the quasi-shuffle algebra.
pub fn antipode_quasi<L: Ord + Clone>(w: &Word<L>, pairing: &dyn Pairing<L>) -> Result<LinComb<L>, WordsError> {
    let mut memo: BTreeMap<usize, LinComb<L>> = BTreeMap::new();
    antipode_quasi_suffix(w, 0, pairing, &mut memo)
}

fn antipode_quasi_suffix<L: Ord + Clone>(
    w: &Word<L>,
    start: usize,
    pairing: &dyn Pairing<L>,
    memo: &mut BTreeMap<usize, LinComb<L>>,
) -> Result<LinComb<L>, WordsError> {
    if let Some(x) = memo.get(&start) {
        return Ok(x.clone());
    }
    let s = w.suffix(start);
    let k = s.len();
    let out = if k == 0 {
        LinComb::word(Word::empty())
    } else {
        let mut out = LinComb::term(s.clone(), -Q::one());
        for j in 1..k {
            let tail = antipode_quasi_suffix(w, start + j, pairing, memo)?;
            let head = LinComb::word(s.prefix(j));
            let prod = tail.bilinear(&head, |a, b| quasi_shuffle(a, b, pairing))?;
            out.add_scaled(&prod, &-Q::one());
        }
        out
    };
    memo.insert(start, out.clone());
    Ok(out)
}

/// All Lyndon words up to `max_len`: words strictly smaller than each of
/// their proper suffixes. Sorted by length, then lexicographically.
pub fn lyndon_words<L: Ord + Clone>(alphabet: &[L], max_len: usize) -> Vec<Word<L>> {
    let mut letters = alphabet.to_vec();
    letters.sort();
    letters.dedup();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<L>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.push(w2);
            }
        }
        for w in &next {
            if is_lyndon(w) {
                out.push(Word(w.clone()));
            }
        }
        layer = next;
    }
    out
}

pub fn is_lyndon<L: Ord>(w: &[L]) -> bool {
    !w.is_empty() && (1..w.len()).all(|j| w < &w[j..])
}
