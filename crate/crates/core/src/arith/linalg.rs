//! Gaussian elimination over any field with (possibly uncertain) zero tests.

use rug::Rational;

use super::ball::ComplexBall;
use super::quad::QuadNumber;

/// Outcome of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zeroness {
    Zero,
    NonZero,
    Unknown,
}

/// Field operations needed by elimination.
///
/// `div` is only called with a divisor whose zeroness is `NonZero`.
pub trait FieldElem: Clone {
    fn zeroness(&self) -> Zeroness;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;

    /// Pivot preference; larger is better among certified nonzero candidates.
    fn pivot_score(&self) -> f64 {
        0.0
    }

    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }
}

impl FieldElem for Rational {
    fn zeroness(&self) -> Zeroness {
        if *self == 0 {
            Zeroness::Zero
        } else {
            Zeroness::NonZero
        }
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn div(&self, other: &Self) -> Self {
        Rational::from(self / other)
    }
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
}

/// Elements of one fixed quadratic field; mixing fields is a caller bug.
impl FieldElem for QuadNumber {
    fn zeroness(&self) -> Zeroness {
        if self.is_zero() {
            Zeroness::Zero
        } else {
            Zeroness::NonZero
        }
    }
    fn add(&self, other: &Self) -> Self {
        QuadNumber::add(self, other).expect("same quadratic field")
    }
    fn sub(&self, other: &Self) -> Self {
        QuadNumber::sub(self, other).expect("same quadratic field")
    }
    fn mul(&self, other: &Self) -> Self {
        QuadNumber::mul(self, other).expect("same quadratic field")
    }
    fn div(&self, other: &Self) -> Self {
        QuadNumber::div(self, other).expect("same quadratic field, nonzero divisor")
    }
    fn zero_like(&self) -> Self {
        QuadNumber::zero().in_field(self.d)
    }
    fn one_like(&self) -> Self {
        QuadNumber::one().in_field(self.d)
    }
}

impl FieldElem for ComplexBall {
    fn zeroness(&self) -> Zeroness {
        if self.is_exact_zero() {
            Zeroness::Zero
        } else if self.excludes_zero() {
            Zeroness::NonZero
        } else {
            Zeroness::Unknown
        }
    }
    fn add(&self, other: &Self) -> Self {
        ComplexBall::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ComplexBall::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ComplexBall::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        ComplexBall::div(self, other).expect("certified nonzero divisor")
    }
    fn zero_like(&self) -> Self {
        ComplexBall::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        ComplexBall::one(self.prec())
    }
    fn pivot_score(&self) -> f64 {
        self.abs_lower().to_f64()
    }
}

/// Reduced row echelon form together with bookkeeping.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    /// Nonzero rows of the reduced matrix.
    pub rows: Vec<Vec<T>>,
    /// Pivot column of each row in `rows`.
    pub pivots: Vec<usize>,
    /// Original index of the row that became each pivot row.
    pub source_rows: Vec<usize>,
    pub ncols: usize,
}

impl<T> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Elimination stalled on an entry that could be zero or nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncertified {
    pub column: usize,
}

/// Row-reduces `matrix` (rows of equal length `ncols`).
///
/// A column with no certified nonzero candidate is skipped even if some
/// candidates are undecided; the rank is still certified when every row ends
/// up with a pivot or the leftover rows are exactly zero. Fails otherwise.
pub fn rref<T: FieldElem>(matrix: &[Vec<T>], ncols: usize) -> Result<Echelon<T>, Uncertified> {
    let mut rows: Vec<Vec<T>> = matrix.to_vec();
    let mut origin: Vec<usize> = (0..rows.len()).collect();
    let mut pivots = Vec::new();
    let mut source_rows = Vec::new();
    let mut top = 0;
    let mut first_uncertain = None;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        let mut uncertain = false;
        for (r, row) in rows.iter().enumerate().skip(top) {
            match row[col].zeroness() {
                Zeroness::NonZero => {
                    let score = row[col].pivot_score();
                    if best.is_none_or(|(_, s)| score > s) {
                        best = Some((r, score));
                    }
                }
                Zeroness::Unknown => uncertain = true,
                Zeroness::Zero => {}
            }
        }
        let Some((pr, _)) = best else {
            if uncertain && first_uncertain.is_none() {
                first_uncertain = Some(col);
            }
            continue;
        };
        rows.swap(top, pr);
        origin.swap(top, pr);
        let inv = rows[top][col].one_like().div(&rows[top][col]);
        let pivot_row: Vec<T> = rows[top].iter().map(|x| x.mul(&inv)).collect();
        rows[top] = pivot_row;
        for r in 0..rows.len() {
            if r == top || rows[r][col].zeroness() == Zeroness::Zero {
                continue;
            }
            let factor = rows[r][col].clone();
            let updated: Vec<T> = rows[r]
                .iter()
                .zip(rows[top].iter())
                .enumerate()
                .map(|(c, (x, p))| if c == col { x.zero_like() } else { x.sub(&factor.mul(p)) })
                .collect();
            rows[r] = updated;
        }
        pivots.push(col);
        source_rows.push(origin[top]);
        top += 1;
    }
    // leftover rows must be certified zero, otherwise the rank is not decided
    for row in rows.iter().skip(top) {
        if let Some(col) = row.iter().position(|x| x.zeroness() == Zeroness::Unknown) {
            return Err(Uncertified { column: first_uncertain.unwrap_or(col) });
        }
    }
    rows.truncate(top);
    Ok(Echelon { rows, pivots, source_rows, ncols })
}

pub fn rank<T: FieldElem>(matrix: &[Vec<T>], ncols: usize) -> Result<usize, Uncertified> {
    Ok(rref(matrix, ncols)?.rank())
}

/// Solution set of `A x = b`.
#[derive(Clone, Debug)]
pub enum Solution<T> {
    /// Particular solution (free variables set to zero) and the null-space basis.
    Solved { particular: Vec<T>, kernel: Vec<Vec<T>> },
    /// Index of an original row whose equation cannot hold.
    Inconsistent { row: usize },
}

/// Solves `A x = b` where `A` has `ncols` columns; `zero` fixes the field.
pub fn solve<T: FieldElem>(a: &[Vec<T>], b: &[T], ncols: usize, zero: &T) -> Result<Solution<T>, Uncertified> {
    let augmented: Vec<Vec<T>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let ech = rref(&augmented, ncols + 1)?;
    if let Some(k) = ech.pivots.iter().position(|&c| c == ncols) {
        // a skipped column may still carry this row
        if let Some(col) = ech.rows[k][..ncols].iter().position(|x| x.zeroness() == Zeroness::Unknown) {
            return Err(Uncertified { column: col });
        }
        return Ok(Solution::Inconsistent { row: ech.source_rows[k] });
    }
    let mut particular = vec![zero.zero_like(); ncols];
    for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()) {
        particular[pc] = row[ncols].clone();
    }
    let kernel = kernel_from_echelon(&ech, ncols, zero);
    Ok(Solution::Solved { particular, kernel })
}

/// Null-space basis, one vector per free column (in increasing column order).
pub fn kernel_from_echelon<T: FieldElem>(ech: &Echelon<T>, ncols: usize, zero: &T) -> Vec<Vec<T>> {
    let mut kernel = Vec::new();
    for free in (0..ncols).filter(|c| !ech.pivots.contains(c)) {
        let mut v = vec![zero.zero_like(); ncols];
        v[free] = zero.one_like();
        for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()) {
            v[pc] = row[free].neg();
        }
        kernel.push(v);
    }
    kernel
}

pub fn kernel<T: FieldElem>(a: &[Vec<T>], ncols: usize, zero: &T) -> Result<Vec<Vec<T>>, Uncertified> {
    let ech = rref(a, ncols)?;
    Ok(kernel_from_echelon(&ech, ncols, zero))
}
