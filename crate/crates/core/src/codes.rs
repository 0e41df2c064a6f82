//! Quantum CSS and stabilizer codes over GF(q), the symplectic form, and
//! generators for a few standard code families.
//!
//! Stabilizer matrices use the interleaved layout: qudit `i` occupies columns
//! `2i` (X part `a_i`) and `2i + 1` (Z part `b_i`). Two operators commute when
//! `sum_i a_i b'_i - a'_i b_i = 0`.

use thiserror::Error;

use crate::gf::{FFElem, FieldSpec};
use crate::linalg::{LinalgError, MatrixGF};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("hx row {hx_row} does not commute with hz row {hz_row}")]
    Noncommuting { hx_row: usize, hz_row: usize },
    #[error("stabilizer rows {row_a} and {row_b} do not commute")]
    NotSelfOrthogonal { row_a: usize, row_b: usize },
    #[error("stabilizer matrix has an odd number of columns ({0})")]
    OddColumns(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("unknown code name {0:?}")]
    UnknownName(String),
    #[error("code {name:?} is not available over {field}")]
    FieldUnsupported { name: String, field: String },
    #[error("invalid code parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which logical operators a CSS distance refers to.
///
/// `Z` is `min wt(v)` over `hx v^T = 0`, `v` outside the row space of `hz`;
/// `X` swaps the roles of the two matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    pub fn label(self) -> &'static str {
        match self {
            Sector::X => "x",
            Sector::Z => "z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    field: FieldSpec,
    hx: MatrixGF,
    hz: MatrixGF,
    n: usize,
    k: usize,
    rank_hx: usize,
    rank_hz: usize,
}

fn check_field(field: &FieldSpec, m: &MatrixGF) -> Result<(), CodeError> {
    if m.field() != field {
        return Err(CodeError::FieldMismatch(
            field.to_string(),
            m.field().to_string(),
        ));
    }
    Ok(())
}

/// Validates a CSS pair: equal widths and `hx · hz^T = 0`.
pub fn css_new(field: &FieldSpec, hx: MatrixGF, hz: MatrixGF) -> Result<CssCode, CodeError> {
    check_field(field, &hx)?;
    check_field(field, &hz)?;
    if hx.ncols() != hz.ncols() {
        return Err(CodeError::DimensionMismatch(format!(
            "hx has {} columns, hz has {}",
            hx.ncols(),
            hz.ncols()
        )));
    }
    let product = hx.mul_transpose(&hz)?;
    for i in 0..product.nrows() {
        if let Some(j) = product.row(i).iter().position(|x| !x.is_zero()) {
            return Err(CodeError::Noncommuting {
                hx_row: i,
                hz_row: j,
            });
        }
    }
    let n = hx.ncols();
    let rank_hx = hx.rank();
    let rank_hz = hz.rank();
    Ok(CssCode {
        field: field.clone(),
        hx,
        hz,
        n,
        k: n - rank_hx - rank_hz,
        rank_hx,
        rank_hz,
    })
}

impl CssCode {
    pub fn new(hx: MatrixGF, hz: MatrixGF) -> Result<Self, CodeError> {
        let field = hx.field().clone();
        css_new(&field, hx, hz)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn hx(&self) -> &MatrixGF {
        &self.hx
    }

    pub fn hz(&self) -> &MatrixGF {
        &self.hz
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank_hx(&self) -> usize {
        self.rank_hx
    }

    pub fn rank_hz(&self) -> usize {
        self.rank_hz
    }

    /// `(checks, trivial)` for a sector: logical operators satisfy
    /// `checks · v^T = 0` and lie outside the row space of `trivial`.
    pub fn sector(&self, which: Sector) -> (&MatrixGF, &MatrixGF) {
        match which {
            Sector::Z => (&self.hx, &self.hz),
            Sector::X => (&self.hz, &self.hx),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabCode {
    field: FieldSpec,
    s: MatrixGF,
    n: usize,
    k: usize,
    rank: usize,
}

/// Validates a stabilizer generator matrix in interleaved layout.
pub fn stab_new(field: &FieldSpec, s: MatrixGF) -> Result<StabCode, CodeError> {
    check_field(field, &s)?;
    if !s.ncols().is_multiple_of(2) {
        return Err(CodeError::OddColumns(s.ncols()));
    }
    let product = twist(&s).mul_transpose(&s)?;
    for i in 0..product.nrows() {
        if let Some(j) = product.row(i).iter().position(|x| !x.is_zero()) {
            let (row_a, row_b) = if i < j { (i, j) } else { (j, i) };
            return Err(CodeError::NotSelfOrthogonal { row_a, row_b });
        }
    }
    let n = s.ncols() / 2;
    let rank = s.rank();
    Ok(StabCode {
        field: field.clone(),
        s,
        n,
        k: n - rank,
        rank,
    })
}

impl StabCode {
    pub fn new(s: MatrixGF) -> Result<Self, CodeError> {
        let field = s.field().clone();
        stab_new(&field, s)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn s(&self) -> &MatrixGF {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Matrix whose ordinary kernel is the symplectic complement of the
    /// stabilizer rows.
    pub fn twisted(&self) -> MatrixGF {
        twist(&self.s)
    }
}

/// Maps each pair `(a, b)` to `(b, -a)`, so that `twist(u) · v = -<u, v>`.
fn twist(s: &MatrixGF) -> MatrixGF {
    let f = s.field();
    let mut out = MatrixGF::zeros(f, s.nrows(), s.ncols());
    for r in 0..s.nrows() {
        for i in 0..s.ncols() / 2 {
            out.set(r, 2 * i, s.get(r, 2 * i + 1));
            out.set(r, 2 * i + 1, f.neg(s.get(r, 2 * i)));
        }
    }
    out
}

/// Either kind of code, as produced by [`gen_named`] and read by the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyCode {
    Css(CssCode),
    Stab(StabCode),
}

impl AnyCode {
    pub fn n(&self) -> usize {
        match self {
            AnyCode::Css(c) => c.n(),
            AnyCode::Stab(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            AnyCode::Css(c) => c.k(),
            AnyCode::Stab(c) => c.k(),
        }
    }

    pub fn field(&self) -> &FieldSpec {
        match self {
            AnyCode::Css(c) => c.field(),
            AnyCode::Stab(c) => c.field(),
        }
    }
}

/// A generalized Pauli operator as `(a_i, b_i)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympVec {
    pub pairs: Vec<(FFElem, FFElem)>,
}

impl SympVec {
    pub fn new(pairs: Vec<(FFElem, FFElem)>) -> Self {
        SympVec { pairs }
    }

    pub fn from_interleaved(v: &[FFElem]) -> Result<Self, CodeError> {
        if !v.len().is_multiple_of(2) {
            return Err(CodeError::OddColumns(v.len()));
        }
        Ok(SympVec {
            pairs: v.chunks(2).map(|p| (p[0], p[1])).collect(),
        })
    }

    pub fn to_interleaved(&self) -> Vec<FFElem> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn symp_product(field: &FieldSpec, u: &SympVec, v: &SympVec) -> Result<FFElem, CodeError> {
    if u.len() != v.len() {
        return Err(CodeError::DimensionMismatch(format!(
            "symplectic vectors on {} and {} qudits",
            u.len(),
            v.len()
        )));
    }
    Ok(u.pairs
        .iter()
        .zip(&v.pairs)
        .fold(FFElem::ZERO, |acc, (&(a, b), &(a2, b2))| {
            let term = field.sub(field.mul(a, b2), field.mul(a2, b));
            field.add(acc, term)
        }))
}

pub fn symp_weight(v: &SympVec) -> usize {
    v.pairs
        .iter()
        .filter(|(a, b)| !a.is_zero() || !b.is_zero())
        .count()
}

/// Toric code on the `L × L` torus: qudits on edges, `hx` from vertices,
/// `hz` from plaquettes. Signs follow the cellular boundary maps, so the
/// pair commutes over every field.
pub fn gen_toric(l: usize, field: &FieldSpec) -> Result<CssCode, CodeError> {
    if l < 2 {
        return Err(CodeError::InvalidParameter(format!(
            "toric code needs L >= 2, got {l}"
        )));
    }
    let cells = l * l;
    let n = 2 * cells;
    let site = |x: usize, y: usize| (y % l) * l + (x % l);
    let horizontal = |x: usize, y: usize| site(x, y);
    let vertical = |x: usize, y: usize| cells + site(x, y);
    let one = FFElem::ONE;
    let minus = field.neg(one);

    let mut hx = MatrixGF::zeros(field, cells, n);
    let mut hz = MatrixGF::zeros(field, cells, n);
    for y in 0..l {
        for x in 0..l {
            // edge boundaries: head minus tail
            hx.set(site(x + 1, y), horizontal(x, y), one);
            hx.set(site(x, y), horizontal(x, y), minus);
            hx.set(site(x, y + 1), vertical(x, y), one);
            hx.set(site(x, y), vertical(x, y), minus);

            let face = site(x, y);
            hz.set(face, horizontal(x, y), one);
            hz.set(face, vertical(x + 1, y), one);
            hz.set(face, horizontal(x, y + 1), minus);
            hz.set(face, vertical(x, y), minus);
        }
    }
    css_new(field, hx, hz)
}

/// Hypergraph product: `hx = [a ⊗ I | I ⊗ b^T]`, `hz = [I ⊗ b | -a^T ⊗ I]`.
pub fn gen_hgp(a: &MatrixGF, b: &MatrixGF) -> Result<CssCode, CodeError> {
    if a.field() != b.field() {
        return Err(CodeError::FieldMismatch(
            a.field().to_string(),
            b.field().to_string(),
        ));
    }
    let f = a.field();
    let (ra, na) = (a.nrows(), a.ncols());
    let (rb, nb) = (b.nrows(), b.ncols());
    let hx = a
        .kron(&MatrixGF::identity(f, nb))?
        .hstack(&MatrixGF::identity(f, ra).kron(&b.transpose())?)?;
    let hz = MatrixGF::identity(f, na)
        .kron(b)?
        .hstack(&a.transpose().neg().kron(&MatrixGF::identity(f, rb))?)?;
    css_new(f, hx, hz)
}

/// Cyclic repetition check matrix: row `i` is `e_i - e_{i+1 mod L}`.
pub fn cyclic_repetition(l: usize, field: &FieldSpec) -> MatrixGF {
    let mut m = MatrixGF::zeros(field, l, l);
    for i in 0..l {
        m.set(i, i, FFElem::ONE);
        let j = (i + 1) % l;
        m.set(i, j, field.add(m.get(i, j), field.neg(FFElem::ONE)));
    }
    m
}

/// Open-chain repetition check matrix with `L - 1` rows.
pub fn chain_repetition(l: usize, field: &FieldSpec) -> MatrixGF {
    let rows = l.saturating_sub(1);
    let mut m = MatrixGF::zeros(field, rows, l);
    for i in 0..rows {
        m.set(i, i, FFElem::ONE);
        m.set(i, i + 1, field.neg(FFElem::ONE));
    }
    m
}

const HAMMING_7_4: [[u32; 7]; 3] = [
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
];

/// Rows of the cyclic `X Z Z^-1 X^-1 I` generators of the five-qudit code.
fn five_qudit(field: &FieldSpec) -> Result<MatrixGF, CodeError> {
    let one = FFElem::ONE;
    let minus = field.neg(one);
    let mut s = MatrixGF::zeros(field, 4, 10);
    for shift in 0..4 {
        let at = |i: usize| (i + shift) % 5;
        s.set(shift, 2 * at(0), one);
        s.set(shift, 2 * at(1) + 1, one);
        s.set(shift, 2 * at(2) + 1, minus);
        s.set(shift, 2 * at(3), minus);
    }
    Ok(s)
}

/// Small named codes: `steane` (GF(2) only), `five_qubit`, `rep(L)`.
pub fn gen_named(name: &str, field: &FieldSpec) -> Result<AnyCode, CodeError> {
    let trimmed = name.trim();
    match trimmed {
        "steane" => {
            if !field.is_binary() {
                return Err(CodeError::FieldUnsupported {
                    name: trimmed.into(),
                    field: field.to_string(),
                });
            }
            let h = MatrixGF::from_rows(field, 7, &HAMMING_7_4)?;
            Ok(AnyCode::Css(css_new(field, h.clone(), h)?))
        }
        "five_qubit" => Ok(AnyCode::Stab(stab_new(field, five_qudit(field)?)?)),
        _ => {
            let l = trimmed
                .strip_prefix("rep(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.trim().parse::<usize>().ok())
                .filter(|&l| l >= 1)
                .ok_or_else(|| CodeError::UnknownName(trimmed.into()))?;
            let hx = MatrixGF::zeros(field, 0, l);
            Ok(AnyCode::Css(css_new(
                field,
                hx,
                chain_repetition(l, field),
            )?))
        }
    }
}
