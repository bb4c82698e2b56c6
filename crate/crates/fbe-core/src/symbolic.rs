//! Signed-digit address spaces.
//!
//! Digits are nonzero integers `±1..=±N`; a negative digit `-j` names the
//! inverse of map `j`. Infinite words are stored exactly as a preperiod and a
//! primitive period, canonicalized on construction, so equality, the shift,
//! the inverse shifts `σ_n` and the metric `d_𝕀` are all decidable.
//!
//! The metric indexes digits from 1: two words whose first digits differ are
//! at distance `1/2`, and a first difference at index `k` gives `2^{-k}`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("digit 0 is not a valid signed digit")]
    ZeroDigit,
    #[error("digit {digit} exceeds the alphabet size {n_maps}")]
    InvalidDigit { digit: i32, n_maps: usize },
    #[error("cannot shift the empty word")]
    EmptyAddress,
    #[error("truncation depth {depth} is too small for {steps} steps")]
    TruncationDepth { depth: usize, steps: usize },
    #[error("cannot parse address {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A nonzero signed digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digit(i32);

impl Digit {
    pub fn new(value: i32) -> Result<Self, SymbolicError> {
        if value == 0 {
            Err(SymbolicError::ZeroDigit)
        } else {
            Ok(Digit(value))
        }
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// Map index `|value|` (1-based).
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn neg(self) -> Digit {
        Digit(-self.0)
    }

    /// Order by magnitude, then positive before negative.
    pub fn magnitude_cmp(self, other: Digit) -> Ordering {
        self.index()
            .cmp(&other.index())
            .then(other.0.signum().cmp(&self.0.signum()))
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Build a word from raw integers. Panics on a zero digit.
pub fn word(values: &[i32]) -> Vec<Digit> {
    values.iter().map(|&v| Digit::new(v).expect("nonzero digit")).collect()
}

/// Digits negated.
pub fn negate_word(w: &[Digit]) -> Vec<Digit> {
    w.iter().map(|d| d.neg()).collect()
}

/// The word whose composition inverts `w`: `negate(reverse(w))`.
pub fn inverse_word(w: &[Digit]) -> Vec<Digit> {
    w.iter().rev().map(|d| d.neg()).collect()
}

/// True when no adjacent pair cancels.
pub fn is_reduced(w: &[Digit]) -> bool {
    w.windows(2).all(|p| p[0] != p[1].neg())
}

/// Distance `2^{-k}` kept as its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DyadicDistance {
    Zero,
    /// `2^{-k}` with `k ≥ 1`.
    Pow(u32),
}

impl DyadicDistance {
    pub fn to_f64(self) -> f64 {
        match self {
            DyadicDistance::Zero => 0.0,
            DyadicDistance::Pow(k) => 2f64.powi(-(k as i32)),
        }
    }

    /// Distance for a first difference at the 1-based index `k`.
    pub fn at_index(k: usize) -> Self {
        DyadicDistance::Pow(k as u32)
    }
}

impl Ord for DyadicDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DyadicDistance::Zero, DyadicDistance::Zero) => Ordering::Equal,
            (DyadicDistance::Zero, _) => Ordering::Less,
            (_, DyadicDistance::Zero) => Ordering::Greater,
            (DyadicDistance::Pow(a), DyadicDistance::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicDistance::Zero => write!(f, "0"),
            DyadicDistance::Pow(k) => write!(f, "2^-{k}"),
        }
    }
}

/// Finite or eventually periodic signed-digit word in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Address {
    preperiod: Vec<Digit>,
    period: Vec<Digit>,
}

impl Address {
    pub fn finite(digits: Vec<Digit>) -> Self {
        Address {
            preperiod: digits,
            period: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        Address::finite(Vec::new())
    }

    /// `preperiod · overline(period)`, canonicalized. An empty period gives a
    /// finite word.
    pub fn periodic(preperiod: Vec<Digit>, period: Vec<Digit>) -> Self {
        let mut a = Address { preperiod, period };
        a.canonicalize();
        a
    }

    /// Convenience constructor from raw integers.
    pub fn from_ints(preperiod: &[i32], period: &[i32]) -> Self {
        Address::periodic(word(preperiod), word(period))
    }

    fn canonicalize(&mut self) {
        if self.period.is_empty() {
            return;
        }
        let n = self.period.len();
        let p = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.period[i] == self.period[i - p]))
            .unwrap_or(n);
        self.period.truncate(p);
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Length of a finite word; `None` for infinite words.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.preperiod.len())
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.preperiod.is_empty()
    }

    /// Digit at the 0-based position `i`.
    pub fn digit(&self, i: usize) -> Option<Digit> {
        if i < self.preperiod.len() {
            Some(self.preperiod[i])
        } else if self.period.is_empty() {
            None
        } else {
            let j = (i - self.preperiod.len()) % self.period.len();
            Some(self.period[j])
        }
    }

    pub fn first(&self) -> Option<Digit> {
        self.digit(0)
    }

    /// The first `k` digits (fewer if the word is finite and shorter).
    pub fn prefix(&self, k: usize) -> Vec<Digit> {
        (0..k).map_while(|i| self.digit(i)).collect()
    }

    /// All digits that can appear, each once, for alphabet checks.
    fn all_digits(&self) -> impl Iterator<Item = &Digit> {
        self.preperiod.iter().chain(self.period.iter())
    }

    /// `S^k`.
    pub fn tail(&self, k: usize) -> Address {
        if k <= self.preperiod.len() {
            return Address::periodic(self.preperiod[k..].to_vec(), self.period.clone());
        }
        if self.period.is_empty() {
            return Address::empty();
        }
        let r = (k - self.preperiod.len()) % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(r);
        Address::periodic(Vec::new(), period)
    }

    /// Prepend a finite word.
    pub fn prepend(&self, w: &[Digit]) -> Address {
        let mut pre = w.to_vec();
        pre.extend_from_slice(&self.preperiod);
        Address::periodic(pre, self.period.clone())
    }

    /// Index `K` such that `S^K` is all-positive, minimal; `None` if no tail is.
    pub fn positive_tail_start(&self) -> Option<usize> {
        if self.period.is_empty() || !self.period.iter().all(|d| d.is_positive()) {
            return None;
        }
        Some(
            self.preperiod
                .iter()
                .rposition(|d| d.is_negative())
                .map_or(0, |i| i + 1),
        )
    }

    /// Number of leading negative digits.
    pub fn leading_negatives(&self) -> usize {
        let mut k = 0;
        while let Some(d) = self.digit(k) {
            if !d.is_negative() {
                break;
            }
            k += 1;
            if !self.period.is_empty() && k > self.preperiod.len() + self.period.len() {
                // all-negative infinite word
                return usize::MAX;
            }
        }
        k
    }

    /// True when the word has no adjacent cancelling pair, including the
    /// preperiod/period junction and the period wrap.
    pub fn is_reduced(&self) -> bool {
        if !is_reduced(&self.preperiod) || !is_reduced(&self.period) {
            return false;
        }
        if let (Some(&a), Some(&b)) = (self.preperiod.last(), self.period.first()) {
            if a == b.neg() {
                return false;
            }
        }
        if let (Some(&a), Some(&b)) = (self.period.last(), self.period.first()) {
            if a == b.neg() {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |w: &[Digit]| w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".");
        write!(f, "{}", join(&self.preperiod))?;
        if !self.period.is_empty() {
            if !self.preperiod.is_empty() {
                write!(f, ".")?;
            }
            write!(f, "({})*", join(&self.period))?;
        }
        Ok(())
    }
}

fn parse_digits(s: &str, input: &str) -> Result<Vec<Digit>, SymbolicError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|t| {
            let v: i32 = t.trim().parse().map_err(|_| SymbolicError::Parse {
                input: input.to_string(),
                reason: format!("bad digit {t:?}"),
            })?;
            Digit::new(v).map_err(|e| SymbolicError::Parse {
                input: input.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

impl FromStr for Address {
    type Err = SymbolicError;

    /// Syntax: `-1.-1.(2)*`; the empty word is `""` or `∅`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s = input.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Address::empty());
        }
        let err = |reason: &str| SymbolicError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        match s.find('(') {
            None => {
                if s.contains(')') || s.contains('*') {
                    return Err(err("unbalanced period delimiters"));
                }
                Ok(Address::finite(parse_digits(s, input)?))
            }
            Some(open) => {
                let rest = &s[open + 1..];
                let body = rest
                    .strip_suffix(")*")
                    .ok_or_else(|| err("period must end with \")*\""))?;
                if body.is_empty() || body.contains('(') || body.contains(')') {
                    return Err(err("malformed period"));
                }
                let head = &s[..open];
                let head = if head.is_empty() {
                    head
                } else {
                    head.strip_suffix('.')
                        .ok_or_else(|| err("missing '.' before the period"))?
                };
                if !head.is_empty() && head.ends_with('.') {
                    return Err(err("empty digit"));
                }
                Ok(Address::periodic(
                    parse_digits(head, input)?,
                    parse_digits(body, input)?,
                ))
            }
        }
    }
}

/// Membership flags for the code spaces.
///
/// Finite words are classified as truncations: `𝕁₊` and `𝕁₋` hold for every
/// reduced finite word, since any such word extends to both kinds of tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AddressClass {
    /// All words over the alphabet.
    pub all: bool,
    /// Reduced words (no adjacent cancelling pair).
    pub reduced: bool,
    pub positive: bool,
    pub negative: bool,
    /// Negatives followed by positives.
    pub fast_basin: bool,
    /// Positives followed by negatives.
    pub fast_basin_dual: bool,
    pub eventually_positive: bool,
    pub eventually_negative: bool,
}

/// Classify `addr` over the alphabet `±1..=±n_maps`.
pub fn validate(addr: &Address, n_maps: usize) -> Result<AddressClass, SymbolicError> {
    for d in addr.all_digits() {
        if d.index() > n_maps {
            return Err(SymbolicError::InvalidDigit {
                digit: d.value(),
                n_maps,
            });
        }
    }
    let reduced = addr.is_reduced();
    let digits: Vec<Digit> = addr.all_digits().copied().collect();
    let positive = digits.iter().all(|d| d.is_positive());
    let negative = digits.iter().all(|d| d.is_negative());
    let blocks = |first: fn(&Digit) -> bool, second: fn(&Digit) -> bool| {
        let ordered = two_blocks(&addr.preperiod, first, second);
        if addr.is_finite() {
            ordered
        } else {
            ordered && addr.period.iter().all(second)
        }
    };
    let (ev_pos, ev_neg) = if addr.is_finite() {
        (reduced, reduced)
    } else {
        (
            reduced && addr.period.iter().all(|d| d.is_positive()),
            reduced && addr.period.iter().all(|d| d.is_negative()),
        )
    };
    Ok(AddressClass {
        all: true,
        reduced,
        positive,
        negative,
        fast_basin: reduced && blocks(|d| d.is_negative(), |d| d.is_positive()),
        fast_basin_dual: reduced && blocks(|d| d.is_positive(), |d| d.is_negative()),
        eventually_positive: ev_pos,
        eventually_negative: ev_neg,
    })
}

/// True when `w` is a run of `first` digits followed by a run of `second`.
fn two_blocks(w: &[Digit], first: fn(&Digit) -> bool, second: fn(&Digit) -> bool) -> bool {
    let k = w.iter().position(|d| !first(d)).unwrap_or(w.len());
    w[k..].iter().all(second)
}

/// `S`: drop the first digit.
pub fn shift(addr: &Address) -> Result<Address, SymbolicError> {
    if addr.is_empty() {
        return Err(SymbolicError::EmptyAddress);
    }
    Ok(addr.tail(1))
}

/// `σ_n`: prepend `n`, or cancel a leading `-n`.
pub fn sigma(n: Digit, addr: &Address) -> Address {
    if addr.first() == Some(n.neg()) {
        addr.tail(1)
    } else {
        addr.prepend(&[n])
    }
}

pub fn negate(addr: &Address) -> Address {
    Address::periodic(negate_word(&addr.preperiod), negate_word(&addr.period))
}

/// `d_𝕀`, exact.
pub fn metric(a: &Address, b: &Address) -> DyadicDistance {
    if a == b {
        return DyadicDistance::Zero;
    }
    let bound = match (a.is_finite(), b.is_finite()) {
        (false, false) => {
            let pa = a.period.len();
            let pb = b.period.len();
            a.preperiod.len().max(b.preperiod.len()) + pa * pb / gcd(pa, pb)
        }
        _ => a.preperiod.len().max(b.preperiod.len()) + a.period.len() + b.period.len() + 1,
    };
    for i in 0..bound {
        if a.digit(i) != b.digit(i) {
            return DyadicDistance::at_index(i + 1);
        }
    }
    // distinct canonical infinite words always differ within the bound
    DyadicDistance::Zero
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First `length` digits of the concatenation of all positive words over
/// `1..=n_maps` in length-then-lexicographic order.
pub fn disjunctive_prefix(n_maps: usize, length: usize) -> Vec<Digit> {
    let mut out = Vec::with_capacity(length);
    if n_maps == 0 {
        return out;
    }
    let mut len = 1;
    while out.len() < length {
        let mut w = vec![1i32; len];
        loop {
            out.extend(w.iter().map(|&v| Digit(v)).take(length - out.len()));
            if out.len() == length || !next_positive_word(&mut w, n_maps) {
                break;
            }
        }
        len += 1;
    }
    out
}

/// Advance `w` to its lexicographic successor among positive words of the
/// same length; false after the last one.
pub(crate) fn next_positive_word(w: &mut [i32], n_maps: usize) -> bool {
    for i in (0..w.len()).rev() {
        if (w[i] as usize) < n_maps {
            w[i] += 1;
            for x in &mut w[i + 1..] {
                *x = 1;
            }
            return true;
        }
    }
    false
}

/// A finite set of truncated words of common length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSet {
    depth: usize,
    elements: BTreeSet<Vec<Digit>>,
}

impl SymbolicSet {
    /// Truncates every address to `depth` digits.
    pub fn from_addresses(addrs: &[Address], depth: usize) -> Self {
        SymbolicSet {
            depth,
            elements: addrs.iter().map(|a| a.prefix(depth)).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn elements(&self) -> &BTreeSet<Vec<Digit>> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Exact Hausdorff distance under `d_𝕀` to the set of all positive words
    /// of the same length over `1..=n_maps`.
    pub fn distance_to_positive(&self, n_maps: usize) -> DyadicDistance {
        let directed_out = self
            .elements
            .iter()
            .map(|w| match w.iter().position(|d| !d.is_positive()) {
                Some(i) => DyadicDistance::at_index(i + 1),
                None => DyadicDistance::Zero,
            })
            .max()
            .unwrap_or(DyadicDistance::Zero);
        let words: Vec<&Vec<Digit>> = self.elements.iter().collect();
        let worst = min_max_common_prefix(&words, 0, self.depth, n_maps);
        let directed_in = if worst >= self.depth {
            DyadicDistance::Zero
        } else {
            DyadicDistance::at_index(worst + 1)
        };
        directed_out.max(directed_in)
    }
}

/// Over all positive words `u` of length `depth`, the minimum of the longest
/// common prefix between `u` and the set.
fn min_max_common_prefix(words: &[&Vec<Digit>], pos: usize, depth: usize, n_maps: usize) -> usize {
    if pos >= depth || words.is_empty() {
        return pos.min(depth);
    }
    (1..=n_maps as i32)
        .map(|v| {
            let sub: Vec<&Vec<Digit>> = words
                .iter()
                .filter(|w| w.get(pos).map(|d| d.value()) == Some(v))
                .copied()
                .collect();
            if sub.is_empty() {
                pos
            } else {
                min_max_common_prefix(&sub, pos + 1, depth, n_maps)
            }
        })
        .min()
        .unwrap_or(pos)
}

/// Apply the symbolic IFS generated by `σ_n`, `n ∈ maps`, `k` times,
/// truncating one digit per step.
pub fn iterate_symbolic_ifs(s: &SymbolicSet, maps: &[Digit], k: usize) -> Result<SymbolicSet, SymbolicError> {
    if k >= s.depth {
        return Err(SymbolicError::TruncationDepth {
            depth: s.depth,
            steps: k,
        });
    }
    let mut cur = s.clone();
    for _ in 0..k {
        let len = cur.depth - 1;
        let mut next = BTreeSet::new();
        for w in &cur.elements {
            for &n in maps {
                let image: Vec<Digit> = if w.first() == Some(&n.neg()) {
                    w[1..].iter().take(len).copied().collect()
                } else {
                    std::iter::once(n).chain(w.iter().copied()).take(len).collect()
                };
                next.insert(image);
            }
        }
        cur = SymbolicSet {
            depth: len,
            elements: next,
        };
    }
    Ok(cur)
}
