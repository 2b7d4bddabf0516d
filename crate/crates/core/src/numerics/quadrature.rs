//! Adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The driver is vector valued: several integrands that share the same
//! abscissae (and the same difficult regions) are integrated on one
//! subdivision tree. Scalar integration is the `N = 1` case.

use super::NumericsError;

/// Kronrod abscissae on [-1, 1], non-negative half, descending.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_248_931,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod abscissae `XGK[1], XGK[3], ..`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Error targets for [`integrate`] and friends.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(NumericsError::InvalidSpec(format!(
                "rel_tol={}, abs_tol={}, max_subdivisions={}",
                self.rel_tol, self.abs_tol, self.max_subdivisions
            )));
        }
        Ok(())
    }

    fn tolerance(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn check<const N: usize>(x: f64, v: [f64; N]) -> Result<[f64; N], NumericsError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { abscissa: x })
    }
}

fn gk21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<N>, NumericsError>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = check(center, f(center))?;
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut res_abs = [0.0; N];
    for i in 0..N {
        kronrod[i] = fc[i] * WGK[10];
        res_abs[i] = (fc[i] * WGK[10]).abs();
    }
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = check(x1, f(x1))?;
        let f2 = check(x2, f(x2))?;
        for i in 0..N {
            kronrod[i] += WGK[j] * (f1[i] + f2[i]);
            res_abs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        let mean = 0.5 * kronrod[i];
        let mut res_asc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j][i] - mean).abs() + (fv2[j][i] - mean).abs());
        }
        value[i] = kronrod[i] * half;
        error[i] = rescale_error(
            (kronrod[i] - gauss[i]) * half,
            res_abs[i] * half.abs(),
            res_asc * half.abs(),
        );
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates a vector of integrands over `[a, b]` on a shared adaptive
/// subdivision. Every component must meet `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; N], NumericsError>
where
    F: FnMut(f64) -> [f64; N],
{
    spec.validate()?;
    if !(a <= b) {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok([0.0; N]);
    }

    let mut panels = vec![gk21(&mut f, a, b)?];
    loop {
        let mut total = [0.0; N];
        let mut total_err = [0.0; N];
        for panel in &panels {
            for i in 0..N {
                total[i] += panel.value[i];
                total_err[i] += panel.error[i];
            }
        }
        let tol: [f64; N] = std::array::from_fn(|i| spec.tolerance(total[i]));
        if (0..N).all(|i| total_err[i] <= tol[i]) {
            return Ok(total);
        }
        if panels.len() >= spec.max_subdivisions {
            let worst = (0..N)
                .max_by(|&i, &j| (total_err[i] / tol[i]).total_cmp(&(total_err[j] / tol[j])))
                .unwrap_or(0);
            return Err(NumericsError::QuadratureNotConverged {
                estimate: total[worst],
                error_estimate: total_err[worst],
                subdivisions: panels.len(),
            });
        }

        // bisect the panel with the largest error relative to the targets
        let score = |p: &Panel<N>| (0..N).map(|i| p.error[i] / tol[i]).fold(0.0, f64::max);
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| score(x.1).total_cmp(&score(y.1)))
            .expect("non-empty panel list");
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel can no longer be split in floating point
            return Err(NumericsError::QuadratureNotConverged {
                estimate: total[0],
                error_estimate: total_err[0],
                subdivisions: panels.len() + 1,
            });
        }
        panels.push(gk21(&mut f, worst.a, mid)?);
        panels.push(gk21(&mut f, mid, worst.b)?);
    }
}

/// Adaptive quadrature of a scalar integrand over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|x| [f(x)], a, b, spec).map(|[v]| v)
}

/// Integrates `g` over `[a, b]` where `g(w) = φ(w)/√(b − w)` with φ bounded
/// near `b`. The substitution `w = b − t²` removes the singularity, leaving
/// `∫₀^√(b−a) 2t·g(b − t²) dt`.
pub fn integrate_sqrt_singular<F>(
    mut g: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    let t_max = (b - a).sqrt();
    integrate(|t| 2.0 * t * g(b - t * t), 0.0, t_max, spec)
}
