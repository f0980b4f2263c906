/// Cubic Hermite segment on `[t0, t0 + h]`, also used for extrapolation past `t0 + h`.
#[derive(Clone, Debug)]
pub(crate) struct Segment {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    pub dy0: Vec<f64>,
    pub dy1: Vec<f64>,
}

impl Segment {
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        hermite_into(theta, self.h, &self.y0, &self.y1, &self.dy0, &self.dy1, out);
    }
}

/// Writes `y0 + h01 (y1 - y0) + h (h10 dy0 + h11 dy1)`.
///
/// Equal endpoints with zero slopes reproduce `y0` bitwise.
#[inline]
pub(crate) fn hermite_into(
    theta: f64,
    h: f64,
    y0: &[f64],
    y1: &[f64],
    dy0: &[f64],
    dy1: &[f64],
    out: &mut [f64],
) {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h01 = 3.0 * t2 - 2.0 * t3;
    let h10 = t3 - 2.0 * t2 + theta;
    let h11 = t3 - t2;
    for k in 0..out.len() {
        out[k] = y0[k] + h01 * (y1[k] - y0[k]) + h * (h10 * dy0[k] + h11 * dy1[k]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic() {
        // p(t) = t^3 - t on [1, 1.5]
        let p = |t: f64| t * t * t - t;
        let dp = |t: f64| 3.0 * t * t - 1.0;
        let s = Segment {
            t0: 1.0,
            h: 0.5,
            y0: vec![p(1.0)],
            y1: vec![p(1.5)],
            dy0: vec![dp(1.0)],
            dy1: vec![dp(1.5)],
        };
        let mut out = [0.0];
        for t in [1.0, 1.1, 1.25, 1.5, 1.8] {
            s.eval_into(t, &mut out);
            assert!((out[0] - p(t)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn flat_segment_is_exact() {
        let y = 0.1 + 0.2;
        let s = Segment {
            t0: 0.0,
            h: 0.3,
            y0: vec![y],
            y1: vec![y],
            dy0: vec![0.0],
            dy1: vec![0.0],
        };
        let mut out = [0.0];
        for k in 0..20 {
            s.eval_into(0.3 * k as f64 / 13.0, &mut out);
            assert_eq!(out[0], y);
        }
    }
}
