//! Adaptive Gauss–Kronrod quadrature with endpoint-singularity substitutions.
//!
//! The basic rule is the 7/15-point Gauss–Kronrod pair with the QUADPACK
//! error heuristics; intervals are bisected in order of decreasing error
//! estimate. Integrable power singularities at the ends of an interval are
//! removed with the substitution x = a + (b − a)·t^p, which turns an
//! integrand behaving like (x − a)^σ into one behaving like t^{p(σ+1)−1}.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

impl QuadSettings {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

/// Value and estimated absolute error of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let fc = f(centr);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut error = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Adaptive integration of `f` over the finite interval [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    s: &QuadSettings,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return domain(format!("integration limits must be finite, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = kronrod15(&mut f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut roundoff = 50.0 * f64::EPSILON * first.resabs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let min_width = (b - a).abs() * 1e-14;

    for _ in 0..s.max_subdivisions {
        let tol = s.abs_tol.max(s.rel_tol * value.abs());
        if error <= tol || error <= roundoff * 1.000_001 {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        if (worst.b - worst.a).abs() < min_width {
            // Cannot refine further; leave it and settle for what we have.
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        roundoff += 50.0 * f64::EPSILON * (left.resabs + right.resabs - worst.resabs);
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    value = heap.iter().map(|seg| seg.value).sum();
    error = heap.iter().map(|seg| seg.error).sum();
    let tol = s.abs_tol.max(s.rel_tol * value.abs());
    if !value.is_finite() {
        return Err(Error::Convergence(format!(
            "non-finite integral over [{a}, {b}]"
        )));
    }
    if error > tol && error > roundoff * 1.000_001 {
        return Err(Error::Convergence(format!(
            "adaptive quadrature over [{a}, {b}] reached error {error:.3e} > tolerance {tol:.3e}"
        )));
    }
    Ok(Estimate { value, error })
}

/// Integrates over [a, b] after grading both ends: the left half is mapped
/// by x = a + (m − a)t^p and the right half by x = b − (b − m)t^q, where m
/// is the midpoint. Exponents of 1 leave an end untouched.
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    s: &QuadSettings,
) -> Result<Estimate> {
    integrate_graded_dist(|x, _, _| f(x), a, b, p, q, s)
}

/// As [`integrate_graded`], but `f(x, x − a, b − x)` also receives the
/// distances to both ends, computed without the cancellation of forming
/// x − a or b − x near the graded endpoint.
pub fn integrate_graded_dist<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    s: &QuadSettings,
) -> Result<Estimate> {
    if !(p >= 1.0 && q >= 1.0) {
        return domain(format!(
            "grading exponents must be ≥ 1, got p = {p}, q = {q}"
        ));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let width = b - a;
    let hl = 0.5 * width;
    let hr = width - hl;
    let left = integrate(
        |t: f64| {
            let tp1 = t.powf(p - 1.0);
            let da = hl * tp1 * t;
            // The weight vanishes faster than f can blow up here.
            if da == 0.0 {
                return 0.0;
            }
            f(a + da, da, width - da) * hl * p * tp1
        },
        0.0,
        1.0,
        s,
    )?;
    let right = integrate(
        |t: f64| {
            let tq1 = t.powf(q - 1.0);
            let db = hr * tq1 * t;
            if db == 0.0 {
                return 0.0;
            }
            f(b - db, width - db, db) * hr * q * tq1
        },
        0.0,
        1.0,
        s,
    )?;
    Ok(Estimate {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// Integrates over [a, ∞) for a > 0 with the map x = a·t^{−p}. An integrand
/// decaying like x^{−1−μ} becomes bounded at t = 0 when p = 1/μ.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    p: f64,
    s: &QuadSettings,
) -> Result<Estimate> {
    if !(a > 0.0 && p > 0.0) {
        return domain(format!(
            "semi-infinite integration needs a > 0 and p > 0, got a = {a}, p = {p}"
        ));
    }
    integrate(
        |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            let x = a * t.powf(-p);
            f(x) * x * p / t
        },
        0.0,
        1.0,
        s,
    )
}

/// Integrates over [a, b] with 0 < a < b in the logarithmic variable
/// x = e^v, suited to integrands that vary on many scales.
pub fn integrate_log<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    s: &QuadSettings,
) -> Result<Estimate> {
    if !(a > 0.0 && b >= a) {
        return domain(format!(
            "logarithmic integration needs 0 < a ≤ b, got [{a}, {b}]"
        ));
    }
    integrate(
        |v: f64| {
            let x = v.exp();
            f(x) * x
        },
        a.ln(),
        b.ln(),
        s,
    )
}
