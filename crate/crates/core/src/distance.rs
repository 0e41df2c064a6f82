//! Randomized information-set search for low-weight logical operators.
//!
//! Each round draws a random column permutation `P`, reduces `G·P` to row
//! echelon form and inspects its rows, which are biased toward low weight.
//! The smallest weight of a row outside the stabilizer row space is an upper
//! bound on the distance; over many rounds it converges to the distance.
//!
//! Rounds are grouped into fixed-size blocks. Block `i` draws from a ChaCha
//! stream keyed by `(seed, i)`, and block results merge by (weight, block
//! index), so the outcome does not depend on the number of worker threads.

use std::env;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::codes::{AnyCode, CssCode, Sector, StabCode};
use crate::gf::FFElem;
use crate::linalg::{
    kernel_basis, rand_perm, BitRows, DenseRows, Echelon, LinalgError, MatrixGF, Perm, RowSpace,
    WeightKind,
};

/// Environment variable that overrides the exhaustive-search budget.
pub const BUDGET_ENV: &str = "QDIST_BUDGET";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistanceError {
    #[error("the code encodes no logical qudits (k = 0)")]
    ZeroLogicalDim,
    #[error("every echelon row lies in the stabilizer row space")]
    NoLogicalRow,
    #[error("exhaustive search space {space} exceeds the budget {budget}")]
    TooLarge { space: u64, budget: u64 },
    #[error("convergence estimate needs 1 <= hits <= iters, got hits={hits} iters={iters}")]
    DomainError { hits: u64, iters: u64 },
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error("witness failed validation: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsParams {
    /// Maximum number of rounds.
    pub iters: u64,
    /// Stop as soon as the bound drops to this weight; 0 disables.
    pub dist_floor: usize,
    pub seed: u64,
    /// Rounds per RNG block.
    pub block_size: u64,
    /// Worker threads; the result is identical for every value.
    pub threads: usize,
}

impl Default for IsParams {
    fn default() -> Self {
        IsParams {
            iters: 10_000,
            dist_floor: 0,
            seed: 0,
            block_size: 64,
            threads: 1,
        }
    }
}

impl IsParams {
    pub fn with_iters(iters: u64, seed: u64) -> Self {
        IsParams {
            iters,
            seed,
            ..IsParams::default()
        }
    }

    fn validate(&self) -> Result<(), DistanceError> {
        if self.iters == 0 {
            return Err(DistanceError::InvalidParams("iters must be >= 1".into()));
        }
        if self.block_size == 0 {
            return Err(DistanceError::InvalidParams(
                "block_size must be >= 1".into(),
            ));
        }
        if self.threads == 0 {
            return Err(DistanceError::InvalidParams("threads must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult {
    /// Smallest logical weight found; an upper bound on the distance.
    pub d_upper: usize,
    /// A logical operator of weight `d_upper`, in the code's coordinates.
    pub witness: Vec<FFElem>,
    /// Rounds whose best row had weight `d_upper`.
    pub hits: u64,
    pub iters_done: u64,
    /// Heuristic probability that the distance is below `d_upper`.
    pub p_miss: f64,
    /// True when the run stopped because `d_upper <= dist_floor`.
    pub hit_floor: bool,
}

/// Generator rows, trivial row space and weight rule for one search.
struct Search<'a, E> {
    g: E,
    trivial: &'a RowSpace,
    kind: WeightKind,
    /// Number of permuted units: columns, or qudit pairs for symplectic weight.
    units: usize,
}

impl<'a, E: Echelon> Search<'a, E> {
    fn new(g: &MatrixGF, trivial: &'a RowSpace, kind: WeightKind) -> Self {
        let units = match kind {
            WeightKind::Hamming => g.ncols(),
            WeightKind::Symplectic => g.ncols() / 2,
        };
        Search {
            g: E::load(g),
            trivial,
            kind,
            units,
        }
    }

    fn column_map(&self, perm: &Perm) -> Perm {
        match self.kind {
            WeightKind::Hamming => perm.clone(),
            WeightKind::Symplectic => perm.on_pairs(),
        }
    }

    /// Lightest non-trivial echelon row of weight at most `cutoff`.
    fn round_with(
        &self,
        perm: &Perm,
        scratch: &mut E,
        cutoff: usize,
    ) -> Result<Option<(usize, Vec<FFElem>)>, DistanceError> {
        let col_map = self.column_map(perm);
        scratch.permute_from(&self.g, col_map.mapping());
        let rank = scratch.rref().len();
        let mut candidates: Vec<(usize, usize)> = (0..rank)
            .map(|r| (scratch.weight(r, self.kind), r))
            .filter(|&(w, _)| w <= cutoff)
            .collect();
        candidates.sort_unstable();
        for (w, r) in candidates {
            let row = scratch.gather_row(r, col_map.mapping());
            if !self.trivial.contains(&row)? {
                return Ok(Some((w, row)));
            }
        }
        Ok(None)
    }

    fn run_block(&self, params: &IsParams, block: u64) -> Result<BlockOutcome, DistanceError> {
        let start = block * params.block_size;
        let len = params.block_size.min(params.iters - start);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(block);
        let mut scratch = self.g.clone();
        let mut out = BlockOutcome::default();
        for _ in 0..len {
            out.done += 1;
            let perm = rand_perm(self.units, &mut rng);
            let cutoff = out.best.as_ref().map_or(usize::MAX, |(w, _)| *w);
            if let Some((w, row)) = self.round_with(&perm, &mut scratch, cutoff)? {
                if w < cutoff {
                    out.best = Some((w, row));
                    out.hits = 1;
                } else {
                    out.hits += 1;
                }
            }
            if params.dist_floor > 0
                && out
                    .best
                    .as_ref()
                    .is_some_and(|(w, _)| *w <= params.dist_floor)
            {
                out.floor_hit = true;
                break;
            }
        }
        Ok(out)
    }

    fn run(&self, params: &IsParams) -> Result<Merged, DistanceError> {
        let blocks = params.iters.div_ceil(params.block_size);
        let mut merged = Merged::default();
        if params.threads == 1 {
            for b in 0..blocks {
                if merged.absorb(self.run_block(params, b)?) {
                    break;
                }
            }
            return Ok(merged);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.threads)
            .build()
            .map_err(|e| DistanceError::InvalidParams(e.to_string()))?;
        let wave = 2 * params.threads as u64;
        let mut next = 0;
        while next < blocks {
            let end = (next + wave).min(blocks);
            let outcomes: Vec<Result<BlockOutcome, DistanceError>> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|b| self.run_block(params, b))
                    .collect()
            });
            for outcome in outcomes {
                if merged.absorb(outcome?) {
                    return Ok(merged);
                }
            }
            next = end;
        }
        Ok(merged)
    }
}

#[derive(Default)]
struct BlockOutcome {
    best: Option<(usize, Vec<FFElem>)>,
    hits: u64,
    done: u64,
    floor_hit: bool,
}

#[derive(Default)]
struct Merged {
    best: Option<(usize, Vec<FFElem>)>,
    hits: u64,
    done: u64,
    floor_hit: bool,
}

impl Merged {
    /// Folds in the next block in index order; true once the floor is hit.
    fn absorb(&mut self, block: BlockOutcome) -> bool {
        self.done += block.done;
        if let Some((w, row)) = block.best {
            match &self.best {
                Some((cur, _)) if *cur < w => {}
                Some((cur, _)) if *cur == w => self.hits += block.hits,
                _ => {
                    self.best = Some((w, row));
                    self.hits = block.hits;
                }
            }
        }
        self.floor_hit = block.floor_hit;
        block.floor_hit
    }
}

fn search_and_validate(
    g: &MatrixGF,
    checks: &MatrixGF,
    trivial: &MatrixGF,
    kind: WeightKind,
    params: &IsParams,
) -> Result<DistanceResult, DistanceError> {
    params.validate()?;
    let space = RowSpace::new(trivial);
    let merged = if g.field().is_binary() {
        Search::<BitRows>::new(g, &space, kind).run(params)?
    } else {
        Search::<DenseRows>::new(g, &space, kind).run(params)?
    };
    let (d_upper, witness) = merged.best.ok_or(DistanceError::NoLogicalRow)?;
    validate_witness(checks, &space, kind, &witness, d_upper)?;
    Ok(DistanceResult {
        d_upper,
        witness,
        hits: merged.hits,
        iters_done: merged.done,
        p_miss: converge_estimate(merged.hits, merged.done)?,
        hit_floor: merged.floor_hit,
    })
}

/// Checks `checks · w^T = 0`, `w` outside the trivial row space and
/// `weight(w) = expected`.
pub fn validate_witness(
    checks: &MatrixGF,
    trivial: &RowSpace,
    kind: WeightKind,
    witness: &[FFElem],
    expected: usize,
) -> Result<(), DistanceError> {
    if checks.mul_vec(witness)?.iter().any(|x| !x.is_zero()) {
        return Err(DistanceError::InvalidWitness(
            "not in the code kernel".into(),
        ));
    }
    if trivial.contains(witness)? {
        return Err(DistanceError::InvalidWitness(
            "witness is a stabilizer".into(),
        ));
    }
    let w = kind.of(witness);
    if w != expected {
        return Err(DistanceError::InvalidWitness(format!(
            "weight {w} differs from reported {expected}"
        )));
    }
    Ok(())
}

/// One information-set round with a random permutation drawn from `rng`.
pub fn is_round<R: Rng + ?Sized>(
    g: &MatrixGF,
    trivial: &RowSpace,
    kind: WeightKind,
    rng: &mut R,
) -> Result<(usize, Vec<FFElem>), DistanceError> {
    let units = match kind {
        WeightKind::Hamming => g.ncols(),
        WeightKind::Symplectic => g.ncols() / 2,
    };
    let perm = rand_perm(units, rng);
    is_round_with_perm(g, trivial, kind, &perm)
}

/// One round with an explicit permutation (of columns, or of qudits for
/// symplectic weight).
pub fn is_round_with_perm(
    g: &MatrixGF,
    trivial: &RowSpace,
    kind: WeightKind,
    perm: &Perm,
) -> Result<(usize, Vec<FFElem>), DistanceError> {
    fn go<E: Echelon>(
        g: &MatrixGF,
        trivial: &RowSpace,
        kind: WeightKind,
        perm: &Perm,
    ) -> Result<(usize, Vec<FFElem>), DistanceError> {
        let search = Search::<E>::new(g, trivial, kind);
        if perm.len() != search.units {
            return Err(LinalgError::DimensionMismatch(format!(
                "permutation of length {} for {} units",
                perm.len(),
                search.units
            ))
            .into());
        }
        let mut scratch = search.g.clone();
        search
            .round_with(perm, &mut scratch, usize::MAX)?
            .ok_or(DistanceError::NoLogicalRow)
    }
    if trivial.ncols() != g.ncols() {
        return Err(LinalgError::DimensionMismatch("trivial space width".into()).into());
    }
    if g.field().is_binary() {
        go::<BitRows>(g, trivial, kind, perm)
    } else {
        go::<DenseRows>(g, trivial, kind, perm)
    }
}

/// Upper bound on the distance of one CSS sector.
pub fn dist_rand_css(
    code: &CssCode,
    which: Sector,
    params: &IsParams,
) -> Result<DistanceResult, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::ZeroLogicalDim);
    }
    let (checks, trivial) = code.sector(which);
    let g = kernel_basis(checks);
    search_and_validate(&g, checks, trivial, WeightKind::Hamming, params)
}

/// Upper bound on the distance of a stabilizer code; permutations act on
/// qudits and weight is symplectic.
pub fn dist_rand_stab(code: &StabCode, params: &IsParams) -> Result<DistanceResult, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::ZeroLogicalDim);
    }
    let checks = code.twisted();
    let g = kernel_basis(&checks);
    search_and_validate(&g, &checks, code.s(), WeightKind::Symplectic, params)
}

/// Heuristic probability that a lighter logical operator was missed:
/// `(1 - hits/iters)^iters`, and 0 when every round hit the minimum.
pub fn converge_estimate(hits: u64, iters: u64) -> Result<f64, DistanceError> {
    if hits < 1 || hits > iters {
        return Err(DistanceError::DomainError { hits, iters });
    }
    if hits == iters {
        return Ok(0.0);
    }
    let rate = hits as f64 / iters as f64;
    Ok((1.0 - rate).powf(iters as f64).clamp(0.0, 1.0))
}

/// Cap on the number of vectors the exhaustive search may face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBudget {
    pub max_vectors: u64,
}

impl Default for ExactBudget {
    /// `2^16`: n <= 16 over GF(2), n <= 10 over GF(3), n <= 8 over GF(4).
    fn default() -> Self {
        ExactBudget {
            max_vectors: 1 << 16,
        }
    }
}

impl ExactBudget {
    /// Default budget, raised by `QDIST_BUDGET` when set to a larger integer.
    pub fn from_env() -> Self {
        let default = ExactBudget::default();
        env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map_or(default, |v| ExactBudget {
                max_vectors: v.max(default.max_vectors),
            })
    }

    fn admit(&self, alphabet: u64, positions: usize) -> Result<(), DistanceError> {
        let space = u32::try_from(positions)
            .ok()
            .and_then(|p| alphabet.checked_pow(p))
            .unwrap_or(u64::MAX);
        if space > self.max_vectors {
            return Err(DistanceError::TooLarge {
                space,
                budget: self.max_vectors,
            });
        }
        Ok(())
    }
}

/// Enumerates vectors by increasing weight and returns the first weight that
/// admits a logical operator.
fn exhaustive(
    checks: &MatrixGF,
    trivial: &MatrixGF,
    kind: WeightKind,
) -> Result<usize, DistanceError> {
    let field = checks.field();
    let q = field.q() as usize;
    let (positions, per_position, stride) = match kind {
        WeightKind::Hamming => (checks.ncols(), q - 1, 1),
        WeightKind::Symplectic => (checks.ncols() / 2, q * q - 1, 2),
    };
    let space = RowSpace::new(trivial);
    let mut v = vec![FFElem::ZERO; checks.ncols()];
    for w in 1..=positions {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            // odometer over nonzero symbols on the support
            let mut digits = vec![0usize; w];
            loop {
                v.fill(FFElem::ZERO);
                for (&pos, &d) in support.iter().zip(&digits) {
                    let symbol = d + 1;
                    match kind {
                        WeightKind::Hamming => v[pos] = FFElem(symbol as u16),
                        WeightKind::Symplectic => {
                            v[stride * pos] = FFElem((symbol % q) as u16);
                            v[stride * pos + 1] = FFElem((symbol / q) as u16);
                        }
                    }
                }
                if checks.mul_vec(&v)?.iter().all(|x| x.is_zero()) && !space.contains(&v)? {
                    return Ok(w);
                }
                let Some(i) = (0..w).rev().find(|&i| digits[i] + 1 < per_position) else {
                    break;
                };
                digits[i] += 1;
                digits[i + 1..].fill(0);
            }
            // next combination in lexicographic order
            let Some(i) = (0..w).rev().find(|&i| support[i] < positions - w + i) else {
                break;
            };
            support[i] += 1;
            for j in i + 1..w {
                support[j] = support[j - 1] + 1;
            }
        }
    }
    Err(DistanceError::ZeroLogicalDim)
}

/// Exact CSS distance by exhaustive enumeration; `None` means both sectors.
pub fn dist_exact_css(
    code: &CssCode,
    which: Option<Sector>,
    budget: ExactBudget,
) -> Result<usize, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::ZeroLogicalDim);
    }
    budget.admit(code.field().q() as u64, code.n())?;
    match which {
        Some(sector) => {
            let (checks, trivial) = code.sector(sector);
            exhaustive(checks, trivial, WeightKind::Hamming)
        }
        None => {
            let z = dist_exact_css(code, Some(Sector::Z), budget)?;
            let x = dist_exact_css(code, Some(Sector::X), budget)?;
            Ok(z.min(x))
        }
    }
}

/// Exact stabilizer distance by exhaustive enumeration.
pub fn dist_exact_stab(code: &StabCode, budget: ExactBudget) -> Result<usize, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::ZeroLogicalDim);
    }
    let q = code.field().q() as u64;
    budget.admit(q * q, code.n())?;
    exhaustive(&code.twisted(), code.s(), WeightKind::Symplectic)
}

/// Exact distance with the budget from [`ExactBudget::from_env`].
pub fn dist_exact(code: &AnyCode, which: Option<Sector>) -> Result<usize, DistanceError> {
    let budget = ExactBudget::from_env();
    match code {
        AnyCode::Css(c) => dist_exact_css(c, which, budget),
        AnyCode::Stab(s) => dist_exact_stab(s, budget),
    }
}
