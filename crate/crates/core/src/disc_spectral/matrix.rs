//! Floquet matrices of the system `Lψ = 0` restricted to Bloch solutions.

use crate::coeffring::{poly_det, BivariatePolynomial, PolyMatrix, Rational};
use crate::disc::{DiscreteOperator, NormalForms, STENCIL};

/// Which fundamental box (and pair of multipliers) indexes the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// `δ̃ × δ` box, variables `(ν₁, μ₁)`, site `(i, j)` at index `i + jδ̃`.
    First,
    /// `ε × ε̃` box, variables `(ν₂, μ₂)`, site `(i, j)` at index `iε̃ + j`.
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloquetMatrix {
    pub kind: MatrixKind,
    pub nf: NormalForms,
    pub entries: PolyMatrix,
}

impl FloquetMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn det(&self) -> BivariatePolynomial {
        poly_det(&self.entries)
    }

    /// Site `(i, j)` of a row/column index.
    pub fn site(&self, index: usize) -> (i64, i64) {
        let k = index as i64;
        match self.kind {
            MatrixKind::First => (k % self.nf.delta_t, k / self.nf.delta_t),
            MatrixKind::Second => (k / self.nf.eps_t, k % self.nf.eps_t),
        }
    }

    /// Row/column index of `(n, m)` together with the Bloch monomial exponents `(α, β)`
    /// with `ψ_{n,m} = ν^α μ^β ψ_{site}`.
    pub fn locate(&self, n: i64, m: i64) -> (usize, i64, i64) {
        match self.kind {
            MatrixKind::First => {
                let (i, j, a, b) = self.nf.reduce_first(n, m);
                ((i + j * self.nf.delta_t) as usize, a, b)
            }
            MatrixKind::Second => {
                let (i, j, a, b) = self.nf.reduce_second(n, m);
                ((i * self.nf.eps_t + j) as usize, a, b)
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let entries = (0..n).map(|r| (0..n).map(|c| self.entries[c][r].clone()).collect()).collect();
        FloquetMatrix { entries, ..self.clone() }
    }

    /// Entries with `ν ↦ 1/ν`, `μ ↦ 1/μ`.
    pub fn invert_variables(&self) -> Self {
        let entries = self.entries.iter().map(|row| row.iter().map(|p| p.invert_variables()).collect()).collect();
        FloquetMatrix { entries, ..self.clone() }
    }
}

/// Matrix of the stencil equations `Σ_s coef_s(n, m) ψ_{(n, m) + shift_s} = 0`, one row
/// per site of the chosen box.
fn build_stencil(
    nf: NormalForms,
    kind: MatrixKind,
    stencil: &[(i64, i64)],
    coef: impl Fn(usize, i64, i64) -> Rational,
) -> FloquetMatrix {
    let size = nf.size();
    let mut fm = FloquetMatrix { kind, nf, entries: vec![vec![BivariatePolynomial::zero(); size]; size] };
    for row in 0..size {
        let (n, m) = fm.site(row);
        for (s, &(dn, dm)) in stencil.iter().enumerate() {
            let (col, a, b) = fm.locate(n + dn, m + dm);
            let term = BivariatePolynomial::monomial(coef(s, n, m), a, b);
            fm.entries[row][col] = &fm.entries[row][col] + &term;
        }
    }
    fm
}

/// `M(ν₁, μ₁)`: row `i + jδ̃` holds `(Lψ)_{i,j}`, column `i + jδ̃` stands for `ψ_{i,j}`.
pub fn build_m(l: &DiscreteOperator) -> FloquetMatrix {
    build_stencil(*l.normal_forms(), MatrixKind::First, &STENCIL, |k, n, m| l.coef(k, n, m).clone())
}

/// `M̂(ν₂, μ₂)`: row `iε̃ + j` holds `(Lψ)_{i,j}` on the `ε × ε̃` box.
pub fn build_mhat(l: &DiscreteOperator) -> FloquetMatrix {
    build_stencil(*l.normal_forms(), MatrixKind::Second, &STENCIL, |k, n, m| l.coef(k, n, m).clone())
}

/// Floquet matrix of the formal adjoint
/// `(L⁺ψ⁺)_{n,m} = a_{n,m}ψ⁺_{n,m} + b_{n−1,m}ψ⁺_{n−1,m} + c_{n,m−1}ψ⁺_{n,m−1} + d_{n−1,m−1}ψ⁺_{n−1,m−1}`
/// in the first box. Entries are Laurent in `(ν₁, μ₁)`.
pub fn build_m_adjoint(l: &DiscreteOperator) -> FloquetMatrix {
    let stencil: Vec<(i64, i64)> = STENCIL.iter().map(|&(p, q)| (-p, -q)).collect();
    build_stencil(*l.normal_forms(), MatrixKind::First, &stencil, |k, n, m| {
        let (p, q) = STENCIL[k];
        l.coef(k, n - p, m - q).clone()
    })
}
