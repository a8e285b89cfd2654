//! The two factorized forms `L = f((∂+A)(1+vT) + w)` and `L = f̂((1+v̂T)(∂+Â) + ŵ)`.

use crate::coeffring::{FitConfig, PeriodicFunction};

use super::{at, fit, SemiDiscError, SemiDiscreteOperator};

/// `L = f((∂ + A)(1 + vT) + w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstDecomposition {
    pub f: Vec<PeriodicFunction>,
    pub v: Vec<PeriodicFunction>,
    pub a: Vec<PeriodicFunction>,
    pub w: Vec<PeriodicFunction>,
}

/// `L = f̂((1 + v̂T)(∂ + Â) + ŵ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondDecomposition {
    pub f: Vec<PeriodicFunction>,
    pub v: Vec<PeriodicFunction>,
    pub a: Vec<PeriodicFunction>,
    pub w: Vec<PeriodicFunction>,
}

/// `f = b`, `v = d/b`, `A = c/d − (log(d/b))′`, `w = a/b − c/d + (log(d/b))′`.
pub fn decompose_first(l: &SemiDiscreteOperator, cfg: &FitConfig) -> Result<FirstDecomposition, SemiDiscError> {
    l.check_nondegenerate(cfg)?;
    let t = l.period();
    let mut out = FirstDecomposition { f: vec![], v: vec![], a: vec![], w: vec![] };
    for n in 0..l.n() {
        let (a, b, c, d) = (&l.a[n], &l.b[n], &l.c[n], &l.d[n]);
        let log_ratio_d = |y: f64| d.eval_derivative(y) / d.eval(y) - b.eval_derivative(y) / b.eval(y);
        out.f.push(b.clone());
        out.v.push(fit(t, cfg, |y| d.eval(y) / b.eval(y))?);
        out.a.push(fit(t, cfg, |y| c.eval(y) / d.eval(y) - log_ratio_d(y))?);
        out.w.push(fit(t, cfg, |y| a.eval(y) / b.eval(y) - c.eval(y) / d.eval(y) + log_ratio_d(y))?);
    }
    Ok(out)
}

/// `f̂ = b`, `v̂ = d/b`, `Â_n = c_{n−1}/d_{n−1}`, `ŵ = a/b − Â`.
pub fn decompose_second(l: &SemiDiscreteOperator, cfg: &FitConfig) -> Result<SecondDecomposition, SemiDiscError> {
    l.check_nondegenerate(cfg)?;
    let t = l.period();
    let mut out = SecondDecomposition { f: vec![], v: vec![], a: vec![], w: vec![] };
    for n in 0..l.n() {
        let (a, b, d) = (&l.a[n], &l.b[n], &l.d[n]);
        let (cp, dp) = (at(&l.c, n as i64 - 1), at(&l.d, n as i64 - 1));
        out.f.push(b.clone());
        out.v.push(fit(t, cfg, |y| d.eval(y) / b.eval(y))?);
        out.a.push(fit(t, cfg, |y| cp.eval(y) / dp.eval(y))?);
        out.w.push(fit(t, cfg, |y| a.eval(y) / b.eval(y) - cp.eval(y) / dp.eval(y))?);
    }
    Ok(out)
}

impl FirstDecomposition {
    /// `a = f(A + w)`, `b = f`, `c = f(v′ + Av)`, `d = fv`.
    pub fn recompose(&self) -> SemiDiscreteOperator {
        let n = self.f.len();
        let mut l = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
        for i in 0..n {
            let (f, v, a, w) = (&self.f[i], &self.v[i], &self.a[i], &self.w[i]);
            l.a.push(f.mul(&a.add(w)));
            l.b.push(f.clone());
            l.c.push(f.mul(&v.derivative().add(&a.mul(v))));
            l.d.push(f.mul(v));
        }
        l
    }
}

impl SecondDecomposition {
    /// `a = f̂(Â + ŵ)`, `b = f̂`, `c = f̂ v̂ Â_{n+1}`, `d = f̂ v̂`.
    pub fn recompose(&self) -> SemiDiscreteOperator {
        let n = self.f.len();
        let mut l = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
        for i in 0..n {
            let (f, v, a, w) = (&self.f[i], &self.v[i], &self.a[i], &self.w[i]);
            let fv = f.mul(v);
            l.a.push(f.mul(&a.add(w)));
            l.b.push(f.clone());
            l.c.push(fv.mul(at(&self.a, i as i64 + 1)));
            l.d.push(fv);
        }
        l
    }
}
