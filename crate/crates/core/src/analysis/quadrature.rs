use num_complex::Complex64;

/// Composite Simpson rule on `[a, b]`; `panels` is rounded up to even.
pub fn simpson<F>(f: F, a: f64, b: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let m = (panels.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for j in 1..m {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + (b - a) * (j as f64 / m as f64));
    }
    acc * (h / 3.0)
}

/// `‖f‖_{L²(a,b)}` by composite Simpson on `|f|²`.
pub fn l2_norm<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> Complex64,
{
    simpson(|x| Complex64::new(f(x).norm_sqr(), 0.0), a, b, panels)
        .re
        .max(0.0)
        .sqrt()
}
