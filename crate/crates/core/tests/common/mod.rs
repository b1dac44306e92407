//! Test-only oracles that share no code with the library.

#![allow(dead_code)]

/// Gauss-Kronrod 7/15 abscissae (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Adaptive Gauss-Kronrod quadrature of a smooth integrand.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol.max(value.abs() * 1e-16) || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    let (rough, _) = gk15(f, a, b);
    rec(f, a, b, rel_tol * rough.abs(), 40)
}

/// `integral_0^x u^(a-1) (1-u)^(b-1) du` for `x <= 1/2`, after `u = t^(1/a)`
/// which removes the endpoint singularity: `(1/a) integral_0^(x^a) (1 - t^(1/a))^(b-1) dt`.
fn lower_half(x: f64, a: f64, b: f64) -> f64 {
    assert!(x <= 0.5);
    if x == 0.0 {
        return 0.0;
    }
    let f = |t: f64| (1.0 - t.powf(1.0 / a)).powf(b - 1.0);
    integrate(&f, 0.0, x.powf(a), 1e-14) / a
}

/// Quadrature oracle for the non-regularized lower incomplete beta function.
pub fn incomplete_beta_quad(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.5 {
        lower_half(x, a, b)
    } else {
        // Reflect the upper part through v = 1 - u so both pieces are
        // integrated away from their singular endpoint.
        lower_half(0.5, a, b) + lower_half(0.5, b, a) - lower_half(1.0 - x, b, a)
    }
}

/// Complete beta function by quadrature.
pub fn beta_quad(a: f64, b: f64) -> f64 {
    incomplete_beta_quad(1.0, a, b)
}
