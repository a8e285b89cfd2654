//! Laplace transformations of the first and second type, normalized by `f̃ ≡ 1`.

use crate::coeffring::{FitConfig, PeriodicFunction};

use super::{at, decompose_first, decompose_second, fit, SemiDiscError, SemiDiscreteOperator};

/// `L̃ = w(1 + vT)w⁻¹(∂ + A) + w`:
/// `ã = A + w`, `b̃ = 1`, `c̃ = v w A_{n+1}/w_{n+1}`, `d̃ = v w/w_{n+1}`.
pub fn laplace_first(l: &SemiDiscreteOperator, cfg: &FitConfig) -> Result<SemiDiscreteOperator, SemiDiscError> {
    let dec = decompose_first(l, cfg)?;
    for w in &dec.w {
        w.check_nonvanishing(cfg)?;
    }
    let t = l.period();
    let one = PeriodicFunction::real_constant(t, 1.0);
    let mut out = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
    for n in 0..l.n() as i64 {
        let (v, w, w1, a1) = (at(&dec.v, n), at(&dec.w, n), at(&dec.w, n + 1), at(&dec.a, n + 1));
        out.a.push(at(&dec.a, n).add(w));
        out.b.push(one.clone());
        out.c.push(fit(t, cfg, |y| v.eval(y) * w.eval(y) * a1.eval(y) / w1.eval(y))?);
        out.d.push(fit(t, cfg, |y| v.eval(y) * w.eval(y) / w1.eval(y))?);
    }
    Ok(out)
}

/// `Ľ = ŵ(∂ + Â)ŵ⁻¹(1 + v̂T) + ŵ`:
/// `ǎ = Â + ŵ − (log ŵ)′`, `b̌ = 1`, `č = v̂′ + v̂Â − v̂(log ŵ)′`, `ď = v̂`.
pub fn laplace_second(l: &SemiDiscreteOperator, cfg: &FitConfig) -> Result<SemiDiscreteOperator, SemiDiscError> {
    let dec = decompose_second(l, cfg)?;
    for w in &dec.w {
        w.check_nonvanishing(cfg)?;
    }
    let t = l.period();
    let one = PeriodicFunction::real_constant(t, 1.0);
    let mut out = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
    for n in 0..l.n() {
        let (v, a, w) = (&dec.v[n], &dec.a[n], &dec.w[n]);
        let lw = |y: f64| w.eval_derivative(y) / w.eval(y);
        out.a.push(fit(t, cfg, |y| a.eval(y) + w.eval(y) - lw(y))?);
        out.b.push(one.clone());
        out.c.push(fit(t, cfg, |y| v.eval_derivative(y) + v.eval(y) * (a.eval(y) - lw(y)))?);
        out.d.push(v.clone());
    }
    Ok(out)
}
