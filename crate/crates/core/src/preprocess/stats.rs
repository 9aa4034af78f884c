//! One-way ANOVA F-test p-values via the regularized incomplete beta function.

use ndarray::{ArrayView2, Axis};

use crate::error::{Error, Result};

const BETA_EPS: f64 = 1e-15;
const BETA_MAX_ITER: usize = 500;
const TINY: f64 = 1e-300;

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEFFS[0];
    let t = x + 7.5;
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for I_x(a, b), modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Upper tail P(F > f) of the F(df1, df2) distribution.
pub fn f_survival(f: f64, df1: f64, df2: f64) -> f64 {
    if !(f > 0.0) {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    // 1 - I_{d1 f/(d1 f + d2)}(d1/2, d2/2) == I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    let x = df2 / (df2 + df1 * f);
    regularized_incomplete_beta(x, df2 / 2.0, df1 / 2.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
}

/// One-way ANOVA of `values` grouped by `classes`.
pub fn one_way_anova(values: &[f64], classes: &[u8]) -> AnovaResult {
    let n = values.len();
    let mut groups: Vec<(u8, f64, usize)> = Vec::new();
    for (&v, &c) in values.iter().zip(classes) {
        match groups.iter_mut().find(|g| g.0 == c) {
            Some(g) => {
                g.1 += v;
                g.2 += 1;
            }
            None => groups.push((c, v, 1)),
        }
    }
    let g = groups.len();
    let grand = values.iter().sum::<f64>() / n as f64;
    let sst: f64 = values.iter().map(|v| (v - grand).powi(2)).sum();
    if g < 2 || n <= g || sst == 0.0 {
        return AnovaResult { f: 0.0, p: 1.0 };
    }
    let ssb: f64 = groups
        .iter()
        .map(|&(_, sum, cnt)| cnt as f64 * (sum / cnt as f64 - grand).powi(2))
        .sum();
    let ssw: f64 = values
        .iter()
        .zip(classes)
        .map(|(v, c)| {
            let &(_, sum, cnt) = groups.iter().find(|g| g.0 == *c).unwrap();
            (v - sum / cnt as f64).powi(2)
        })
        .sum();
    let df1 = (g - 1) as f64;
    let df2 = (n - g) as f64;
    // floors the within-group term so perfectly separated columns give p ≈ 0
    let ssw = ssw.max(sst * 1e-15);
    let f = (ssb / df1) / (ssw / df2);
    AnovaResult {
        f,
        p: f_survival(f, df1, df2),
    }
}

/// Per-column ANOVA p-values of `x` against class labels `y`.
pub fn f_test_pvalues(x: ArrayView2<f64>, y: &[u8]) -> Result<Vec<f64>> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "f-test rows vs labels".into(),
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    let first = y.first().copied();
    if first.is_none() || y.iter().all(|&c| Some(c) == first) {
        return Err(Error::Data("f-test needs at least two distinct classes".into()));
    }
    Ok(x
        .axis_iter(Axis(1))
        .map(|col| one_way_anova(&col.to_vec(), y).p)
        .collect())
}
