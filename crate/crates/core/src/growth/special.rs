//! Exponential integral `E₁` and a log-domain solver for `u + ln u = η`.

use crate::real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E₁(x) = ∫_x^∞ e^{−s}/s ds` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= 1.0 {
        // −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - real::ln(x) - sum
    } else {
        // modified Lentz on the continued fraction e^{−x}/(x+1−1/(x+3−4/(x+5−…)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * real::exp(-x)
    }
}

/// Solve `u + ln u = eta` for `u > 0` (Newton, always converges from the
/// chosen start).
pub fn solve_u_plus_ln_u(eta: f64) -> f64 {
    if eta == f64::INFINITY {
        return f64::INFINITY;
    }
    if eta == f64::NEG_INFINITY {
        return 0.0;
    }
    let mut u = if eta > 1.0 { eta - real::ln(eta) } else { real::exp(eta - 1.0) };
    for _ in 0..100 {
        let g = u + real::ln(u) - eta;
        let next = u - g / (1.0 + 1.0 / u);
        let next = if next <= 0.0 { 0.5 * u } else { next };
        if (next - u).abs() <= 1e-16 * u {
            return next;
        }
        u = next;
    }
    u
}
