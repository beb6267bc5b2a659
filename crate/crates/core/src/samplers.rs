//! Random generation under the uniform, evolutionary and geometric models,
//! plus the increment law that couples two geometric models.

use std::collections::HashSet;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Geometric term law `P(k) = q p^k`, keeping `p` and `q` separately so
/// that `q` stays accurate when it is tiny.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricLaw {
    p: f64,
    q: f64,
    /// `ln p`, or `-inf` when `p = 0`.
    ln_p: f64,
}

impl GeometricLaw {
    pub fn from_p(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::param(format!("p must satisfy 0 <= p < 1, got {p}")));
        }
        let q = 1.0 - p;
        let ln_p = if p > 0.5 { (-q).ln_1p() } else { p.ln() };
        Ok(GeometricLaw { p, q, ln_p })
    }

    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::param(format!("q must satisfy 0 < q <= 1, got {q}")));
        }
        let p = 1.0 - q;
        let ln_p = if p > 0.5 { (-q).ln_1p() } else { p.ln() };
        Ok(GeometricLaw { p, q, ln_p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn ln_p(&self) -> f64 {
        self.ln_p
    }

    /// `P(term = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        if self.p == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        self.q * (k as f64 * self.ln_p).exp()
    }

    /// `P(term >= k) = p^k`.
    pub fn tail(&self, k: u64) -> f64 {
        if k == 0 {
            1.0
        } else if self.p == 0.0 {
            0.0
        } else {
            (k as f64 * self.ln_p).exp()
        }
    }

    /// One draw by inversion: `floor(ln U / ln p)`.
    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> u64 {
        if self.p == 0.0 {
            return 0;
        }
        let u = rng.open01();
        let x = (u.ln() / self.ln_p).floor();
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x as u64
        }
    }
}

/// `n` i.i.d. geometric terms.
pub fn sample_geometric(n: usize, p: f64, rng: &mut RngStream) -> Result<Composition> {
    let law = GeometricLaw::from_p(p)?;
    sample_geometric_law(n, &law, rng)
}

pub fn sample_geometric_law(n: usize, law: &GeometricLaw, rng: &mut RngStream) -> Result<Composition> {
    check_n(n)?;
    let mut terms = Vec::with_capacity(n);
    fill_geometric(&mut terms, n, law, rng);
    Ok(Composition::from_vec_unchecked(terms))
}

/// Refills `buf` with `n` geometric terms; the allocation-free variant used
/// by the sweep harness.
pub fn fill_geometric(buf: &mut Vec<u64>, n: usize, law: &GeometricLaw, rng: &mut RngStream) {
    buf.clear();
    buf.extend((0..n).map(|_| law.draw(rng)));
}

/// Uniform `n`-composition of `m` by stars and bars: a uniform subset of the
/// `m + n - 1` slots is drawn with Floyd's algorithm, choosing whichever of
/// the bar set (`n - 1`) or the star set (`m`) is smaller.
pub fn sample_uniform_bars(n: usize, m: u64, rng: &mut RngStream) -> Result<Composition> {
    check_n(n)?;
    let mut terms = Vec::with_capacity(n);
    fill_uniform_bars(&mut terms, n, m, rng)?;
    Ok(Composition::from_vec_unchecked(terms))
}

pub fn fill_uniform_bars(buf: &mut Vec<u64>, n: usize, m: u64, rng: &mut RngStream) -> Result<()> {
    let bars = (n - 1) as u64;
    let slots = m
        .checked_add(bars)
        .ok_or_else(|| Error::param("m + n - 1 overflows 64 bits"))?;
    buf.clear();
    buf.resize(n, 0);
    if n == 1 {
        buf[0] = m;
        return Ok(());
    }
    if m <= bars {
        // Choose star slots; star number j (0-based, sorted) sits after
        // `slot - j` bars, i.e. in term `slot - j`.
        let stars = floyd_subset(slots, m, rng);
        for (j, &slot) in stars.iter().enumerate() {
            buf[(slot - j as u64) as usize] += 1;
        }
    } else {
        let cuts = floyd_subset(slots, bars, rng);
        let mut prev: u64 = 0;
        for (i, &slot) in cuts.iter().enumerate() {
            buf[i] = slot - prev;
            prev = slot + 1;
        }
        buf[n - 1] = slots - prev;
    }
    Ok(())
}

/// Uniform `k`-subset of `0..universe`, sorted ascending.
fn floyd_subset(universe: u64, k: u64, rng: &mut RngStream) -> Vec<u64> {
    let mut chosen: HashSet<u64> = HashSet::with_capacity(k as usize);
    for j in (universe - k)..universe {
        let t = rng.below(j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut out: Vec<u64> = chosen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Runs the evolutionary chain for `m` steps from `0^n`.
///
/// The chain is the Pólya urn with one initial ball per colour: the next
/// ball copies a uniformly chosen ball already in the urn. Keeping the
/// colours of added balls makes each step O(1).
pub fn sample_uniform_chain(n: usize, m: u64, rng: &mut RngStream) -> Result<Composition> {
    check_n(n)?;
    let mut urn = Evolution::new(n)?;
    for _ in 0..m {
        urn.step(rng);
    }
    Ok(urn.into_composition())
}

/// The evolutionary random composition as an explicit process, for
/// emitting trajectories.
#[derive(Clone, Debug)]
pub struct Evolution {
    terms: Vec<u64>,
    added: Vec<u32>,
}

impl Evolution {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        if n > u32::MAX as usize {
            return Err(Error::param("n too large for the urn sampler"));
        }
        Ok(Evolution { terms: vec![0; n], added: Vec::new() })
    }

    /// Number of balls added so far (the current size).
    pub fn time(&self) -> u64 {
        self.added.len() as u64
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    /// Adds one ball and returns the 0-based index of the term that grew.
    pub fn step(&mut self, rng: &mut RngStream) -> usize {
        let n = self.terms.len() as u64;
        let u = rng.below(n + self.added.len() as u64);
        let j = if u < n { u as usize } else { self.added[(u - n) as usize] as usize };
        self.terms[j] += 1;
        self.added.push(j as u32);
        j
    }

    pub fn snapshot(&self) -> Composition {
        Composition::from_vec_unchecked(self.terms.clone())
    }

    pub fn into_composition(self) -> Composition {
        Composition::from_vec_unchecked(self.terms)
    }
}

/// One step of the chain from an arbitrary composition: term `j` grows with
/// probability `(c(j) + 1) / (n + |c|)`.
pub fn evolve_step(c: &Composition, rng: &mut RngStream) -> Composition {
    let mut terms = c.terms().to_vec();
    evolve_step_in_place(&mut terms, rng);
    Composition::from_vec_unchecked(terms)
}

/// In-place variant of [`evolve_step`]; returns the 0-based index that grew.
/// O(n) per call because no urn history is available.
pub fn evolve_step_in_place(terms: &mut [u64], rng: &mut RngStream) -> usize {
    assert!(!terms.is_empty());
    let n = terms.len() as u64;
    let t: u64 = terms.iter().sum();
    let mut u = rng.below(n + t);
    let j = if u < n {
        u as usize
    } else {
        u -= n;
        let mut idx = 0;
        for (i, &c) in terms.iter().enumerate() {
            if u < c {
                idx = i;
                break;
            }
            u -= c;
        }
        idx
    };
    terms[j] += 1;
    j
}

/// Increment law coupling the geometric models at `p1 < p2`:
/// `P(0) = q2/q1`, `P(k) = (q2/q1)(1 - p1/p2) p2^k` for `k >= 1`.
#[derive(Clone, Copy, Debug)]
pub struct BridgeLaw {
    zero_prob: f64,
    tail: GeometricLaw,
}

impl BridgeLaw {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p1) || !(0.0..1.0).contains(&p2) {
            return Err(Error::param("bridge needs 0 <= p1 < p2 < 1"));
        }
        if p1 >= p2 {
            return Err(Error::param(format!("bridge needs p1 < p2, got p1={p1}, p2={p2}")));
        }
        Ok(BridgeLaw { zero_prob: (1.0 - p2) / (1.0 - p1), tail: GeometricLaw::from_p(p2)? })
    }

    pub fn zero_prob(&self) -> f64 {
        self.zero_prob
    }

    /// Given `k >= 1`, the term is `1 + Geom(p2)`.
    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> u64 {
        if rng.chance(self.zero_prob) {
            0
        } else {
            1 + self.tail.draw(rng)
        }
    }
}

pub fn sample_bridge(n: usize, p1: f64, p2: f64, rng: &mut RngStream) -> Result<Composition> {
    check_n(n)?;
    let law = BridgeLaw::new(p1, p2)?;
    Ok(Composition::from_vec_unchecked((0..n).map(|_| law.draw(rng)).collect()))
}

/// Draws from the geometric model until the size equals `m`. Only sensible
/// for small `n` and `m`; `max_attempts` bounds the loop.
pub fn sample_geometric_conditioned(
    n: usize,
    p: f64,
    m: u64,
    max_attempts: u64,
    rng: &mut RngStream,
) -> Result<Composition> {
    let law = GeometricLaw::from_p(p)?;
    check_n(n)?;
    let mut buf = Vec::with_capacity(n);
    for _ in 0..max_attempts {
        fill_geometric(&mut buf, n, &law, rng);
        if buf.iter().sum::<u64>() == m {
            return Ok(Composition::from_vec_unchecked(buf));
        }
    }
    Err(Error::Unsupported(format!("no size-{m} draw in {max_attempts} attempts")))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    Ok(())
}
