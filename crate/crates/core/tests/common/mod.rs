//! Shared fixtures for the integration tests.
//!
//! The oracles here deliberately avoid the library's field and linear
//! algebra code: they work on plain `u32` residues modulo a prime.
#![allow(dead_code)]

use qdist::codes::{css_new, stab_new};
use qdist::linalg::kernel_basis;
use qdist::{CssCode, FFElem, FieldSpec, MatrixGF, RowSpace, StabCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Matrix Market grammar
// ---------------------------------------------------------------------------

/// Minimal validator for the Matrix Market coordinate format: banner,
/// comment block, size line, exactly `nnz` in-range triplets. Returns the
/// data block (size line and entries) on success.
pub fn validate_mtx(text: &str) -> Result<Vec<String>, String> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or("empty file")?;
    let words: Vec<&str> = banner.split_whitespace().collect();
    if words.len() != 5
        || words[0] != "%%MatrixMarket"
        || !words[1].eq_ignore_ascii_case("matrix")
        || !words[2].eq_ignore_ascii_case("coordinate")
    {
        return Err(format!("bad banner {banner:?}"));
    }
    let field = words[3].to_ascii_lowercase();
    if !["integer", "real", "complex", "pattern"].contains(&field.as_str()) {
        return Err(format!("bad field qualifier {field}"));
    }
    if !["general", "symmetric", "skew-symmetric", "hermitian"]
        .contains(&words[4].to_ascii_lowercase().as_str())
    {
        return Err(format!("bad symmetry qualifier {}", words[4]));
    }
    let mut data = Vec::new();
    let mut size: Option<(u64, u64, u64)> = None;
    let mut count = 0u64;
    for line in lines {
        if size.is_none() {
            if line.starts_with('%') || line.trim().is_empty() {
                continue;
            }
            let nums: Vec<u64> = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<u64>()
                        .map_err(|_| format!("bad size line {line:?}"))
                })
                .collect::<Result<_, _>>()?;
            if nums.len() != 3 {
                return Err(format!("size line needs 3 integers: {line:?}"));
            }
            size = Some((nums[0], nums[1], nums[2]));
            data.push(line.to_string());
            continue;
        }
        if line.starts_with('%') {
            return Err("comment after the size line".into());
        }
        if line.trim().is_empty() {
            continue;
        }
        let (rows, cols, _) = size.unwrap();
        let w: Vec<&str> = line.split_whitespace().collect();
        let want = if field == "pattern" { 2 } else { 3 };
        if w.len() != want {
            return Err(format!("entry {line:?} should have {want} fields"));
        }
        let r: u64 = w[0].parse().map_err(|_| format!("bad row in {line:?}"))?;
        let c: u64 = w[1]
            .parse()
            .map_err(|_| format!("bad column in {line:?}"))?;
        if r < 1 || r > rows || c < 1 || c > cols {
            return Err(format!("entry {line:?} out of range"));
        }
        if field == "integer" {
            w[2].parse::<i64>()
                .map_err(|_| format!("bad integer value in {line:?}"))?;
        }
        count += 1;
        data.push(line.to_string());
    }
    let (_, _, nnz) = size.ok_or("missing size line")?;
    if count != nnz {
        return Err(format!("size line promises {nnz} entries, found {count}"));
    }
    Ok(data)
}

// ---------------------------------------------------------------------------
// Random codes
// ---------------------------------------------------------------------------

pub fn random_matrix<R: Rng>(field: &FieldSpec, rows: usize, cols: usize, rng: &mut R) -> MatrixGF {
    let q = field.q();
    let data = (0..rows * cols)
        .map(|_| FFElem(rng.random_range(0..q) as u16))
        .collect();
    MatrixGF::new(field.clone(), rows, cols, data).unwrap()
}

/// Random combinations of the rows of `basis`.
fn combos<R: Rng>(basis: &MatrixGF, count: usize, rng: &mut R) -> MatrixGF {
    let field = basis.field();
    let coeffs = random_matrix(field, count, basis.nrows(), rng);
    coeffs.matmul(basis).unwrap()
}

/// CSS code with `n` in `4..=max_n` and `k >= 1`: random `hx`, `hz` drawn
/// from the kernel of `hx`.
pub fn random_css(field: &FieldSpec, max_n: usize, seed: u64) -> CssCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(4..=max_n);
        let rx = rng.random_range(1..n - 1);
        let hx = random_matrix(field, rx, n, &mut rng);
        let ker = kernel_basis(&hx);
        if ker.nrows() < 2 {
            continue;
        }
        let rz = rng.random_range(1..ker.nrows());
        let hz = combos(&ker, rz, &mut rng);
        let code = css_new(field, hx, hz).unwrap();
        if code.k() >= 1 && code.rank_hx() > 0 && code.rank_hz() > 0 {
            return code;
        }
    }
}

/// `(a, b) -> (b, -a)` on interleaved pairs.
pub fn twist(s: &MatrixGF) -> MatrixGF {
    let f = s.field();
    let mut out = MatrixGF::zeros(f, s.nrows(), s.ncols());
    for r in 0..s.nrows() {
        for j in 0..s.ncols() / 2 {
            out.set(r, 2 * j, s.get(r, 2 * j + 1));
            out.set(r, 2 * j + 1, f.neg(s.get(r, 2 * j)));
        }
    }
    out
}

/// Isotropic stabilizer code grown one row at a time from the symplectic
/// complement of the rows so far.
pub fn random_stab(field: &FieldSpec, max_n: usize, seed: u64) -> StabCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(2..=max_n);
        let r = rng.random_range(1..n);
        let mut s = MatrixGF::zeros(field, 0, 2 * n);
        let mut tries = 0;
        while s.nrows() < r && tries < 50 {
            tries += 1;
            let complement = if s.nrows() == 0 {
                MatrixGF::identity(field, 2 * n)
            } else {
                kernel_basis(&twist(&s))
            };
            let v = combos(&complement, 1, &mut rng);
            if v.is_zero() || RowSpace::new(&s).contains(v.row(0)).unwrap() {
                continue;
            }
            s = s.vstack(&v).unwrap();
        }
        if s.nrows() == r {
            return stab_new(field, s).unwrap();
        }
    }
}

// ---------------------------------------------------------------------------
// Independent prime-field oracle
// ---------------------------------------------------------------------------

fn to_u32(m: &MatrixGF) -> Vec<Vec<u32>> {
    m.to_rows()
}

/// Rank of integer rows modulo the prime `p`.
pub fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let mut a: Vec<Vec<u32>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let inv = |x: u32| (1..p).find(|&y| x * y % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for x in a[rank].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                let pivot = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Checks over GF(p): `checks · v = 0` modulo p.
fn annihilates(checks: &[Vec<u32>], v: &[u32], p: u32) -> bool {
    checks
        .iter()
        .all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u32>() % p == 0)
}

fn in_span(trivial: &[Vec<u32>], base_rank: usize, v: &[u32], p: u32) -> bool {
    let mut rows = trivial.to_vec();
    rows.push(v.to_vec());
    rank_mod_p(&rows, p) == base_rank
}

/// Minimum weight over all `p^len` vectors that are annihilated by `checks`
/// and lie outside the span of `trivial`. `units` groups coordinates for the
/// weight (1 for Hamming, 2 for symplectic pairs).
fn brute_force(
    checks: &[Vec<u32>],
    trivial: &[Vec<u32>],
    len: usize,
    units: usize,
    p: u32,
) -> Option<usize> {
    let base_rank = rank_mod_p(trivial, p);
    let mut best: Option<usize> = None;
    let mut v = vec![0u32; len];
    loop {
        // odometer over the whole space
        let mut i = 0;
        while i < len {
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
        let w = v
            .chunks(units)
            .filter(|c| c.iter().any(|&x| x != 0))
            .count();
        if best.is_some_and(|b| w >= b) {
            continue;
        }
        if annihilates(checks, &v, p) && !in_span(trivial, base_rank, &v, p) {
            best = Some(w);
        }
    }
}

/// Brute-force CSS sector distance over a prime field: min weight of `v` with
/// `checks · v = 0` and `v` outside the row space of `trivial`.
pub fn oracle_css_sector(checks: &MatrixGF, trivial: &MatrixGF) -> Option<usize> {
    let p = checks.field().q();
    assert_eq!(checks.field().m(), 1, "oracle works over prime fields");
    brute_force(&to_u32(checks), &to_u32(trivial), checks.ncols(), 1, p)
}

/// Brute-force stabilizer distance over a prime field with symplectic weight.
pub fn oracle_stab(code: &StabCode) -> Option<usize> {
    let s = code.s();
    let p = s.field().q();
    assert_eq!(s.field().m(), 1, "oracle works over prime fields");
    // symplectic product <u, v> = sum a_u b_v - b_u a_v; as a check row on v
    // this is (-b_u, a_u) interleaved
    let checks: Vec<Vec<u32>> = to_u32(s)
        .iter()
        .map(|row| row.chunks(2).flat_map(|c| [(p - c[1]) % p, c[0]]).collect())
        .collect();
    brute_force(&checks, &to_u32(s), s.ncols(), 2, p)
}

/// Witness check written without the library's row-space routine.
pub fn witness_ok(
    checks: &MatrixGF,
    trivial: &MatrixGF,
    witness: &[FFElem],
    weight: usize,
    units: usize,
) -> bool {
    let p = checks.field().q();
    let v: Vec<u32> = witness.iter().map(|x| x.value()).collect();
    let w = v
        .chunks(units)
        .filter(|c| c.iter().any(|&x| x != 0))
        .count();
    if w != weight {
        return false;
    }
    if checks
        .mul_vec(witness)
        .unwrap()
        .iter()
        .any(|x| !x.is_zero())
    {
        return false;
    }
    if checks.field().m() == 1 {
        let t = to_u32(trivial);
        !in_span(&t, rank_mod_p(&t, p), &v, p)
    } else {
        !RowSpace::new(trivial).contains(witness).unwrap()
    }
}

// ---------------------------------------------------------------------------
// Field axioms
// ---------------------------------------------------------------------------

/// Number of violated field axioms over all pairs and triples, plus the
/// Frobenius identity `a^q = a`.
pub fn field_axiom_violations(f: &FieldSpec) -> usize {
    let els: Vec<FFElem> = f.elements().collect();
    let (zero, one) = (FFElem::ZERO, FFElem::ONE);
    let mut bad = 0;
    for &a in &els {
        bad += usize::from(f.add(a, zero) != a);
        bad += usize::from(f.mul(a, one) != a);
        bad += usize::from(f.mul(a, zero) != zero);
        bad += usize::from(f.add(a, f.neg(a)) != zero);
        bad += usize::from(f.pow(a, f.q() as u64) != a);
        if !a.is_zero() {
            bad += usize::from(f.mul(a, f.inv(a).unwrap()) != one);
        }
        for &b in &els {
            bad += usize::from(f.add(a, b) != f.add(b, a));
            bad += usize::from(f.mul(a, b) != f.mul(b, a));
            bad += usize::from(f.add(f.sub(a, b), b) != a);
            if !b.is_zero() {
                bad += usize::from(f.mul(f.div(a, b).unwrap(), b) != a);
            }
            for &c in &els {
                bad += usize::from(f.add(f.add(a, b), c) != f.add(a, f.add(b, c)));
                bad += usize::from(f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c)));
                bad += usize::from(f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }
    bad
}
