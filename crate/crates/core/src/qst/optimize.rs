const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// abscissa seen, its value, and the number of bracket reductions.
pub fn golden_section_max<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let (a0, b0) = (a, b);
    let (fa0, fb0) = (f(a), f(b));
    let mut iters = 0;
    while (b - a).abs() > tol && iters < max_iter {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    // endpoints matter when the maximum sits on the bracket boundary
    [(c, fc), (d, fd), (a, f(a)), (b, f(b)), (a0, fa0), (b0, fb0)]
        .into_iter()
        .fold((c, f64::NEG_INFINITY, iters), |best, (x, fx)| {
            if fx > best.1 {
                (x, fx, iters)
            } else {
                best
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_and_boundary_maxima() {
        let (x, fx, _) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(fx.abs() < 1e-14);
        let (x, _, _) = golden_section_max(|x| x.cos(), 0.0, 1.0, 1e-12, 200);
        assert!(x.abs() < 1e-7);
        let (x, _, _) = golden_section_max(|x| x, -2.0, 5.0, 1e-12, 200);
        assert_eq!(x, 5.0);
    }
}
