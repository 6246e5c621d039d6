//! Points on the torus `[0, D)^d` and the 1-norm torus distance.

/// A point with coordinates reduced modulo D into `[0, D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    coords: [f64; 2],
    dim: usize,
}

impl TorusPoint {
    /// Reduce arbitrary real coordinates into `[0, D)`.
    pub fn new(coords: &[f64], domain: f64) -> Self {
        assert!(
            coords.len() == 1 || coords.len() == 2,
            "torus dimension must be 1 or 2"
        );
        let mut reduced = [0.0; 2];
        for (i, &c) in coords.iter().enumerate() {
            let mut r = c % domain;
            if r < 0.0 {
                r += domain;
            }
            // c % D can return D exactly when c is a tiny negative number
            if r >= domain {
                r = 0.0;
            }
            reduced[i] = r;
        }
        TorusPoint {
            coords: reduced,
            dim: coords.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn coord(&self, axis: usize) -> f64 {
        self.coords[axis]
    }
}

/// Per-coordinate distance on the circle of circumference D.
#[inline]
pub fn circle_distance(a: f64, b: f64, domain: f64) -> f64 {
    let d = (a - b).abs();
    d.min(domain - d)
}

/// 1-norm distance between `s` and the lattice `y + D Z^d`: the sum of the
/// per-coordinate circle distances. Bounded by `d * D / 2`.
pub fn torus_distance(s: &TorusPoint, y: &TorusPoint, domain: f64) -> f64 {
    debug_assert_eq!(s.dim(), y.dim());
    let mut total = 0.0;
    for i in 0..s.dim() {
        total += circle_distance(s.coord(i), y.coord(i), domain);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        let d = 60.0;
        let s = TorusPoint::new(&[50.0], d);
        let y = TorusPoint::new(&[10.0], d);
        assert_eq!(torus_distance(&s, &y, d), 20.0);

        let p = TorusPoint::new(&[3.0, 4.0], 10.0);
        assert_eq!(torus_distance(&p, &p, 10.0), 0.0);

        // antipodal point attains d * D / 2
        let o = TorusPoint::new(&[0.0, 0.0], 10.0);
        let a = TorusPoint::new(&[5.0, 5.0], 10.0);
        assert_eq!(torus_distance(&o, &a, 10.0), 10.0);
    }

    #[test]
    fn reduction_into_domain() {
        let p = TorusPoint::new(&[-0.5, 12.5], 10.0);
        assert!((p.coord(0) - 9.5).abs() < 1e-12);
        assert!((p.coord(1) - 2.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetry_and_range(a in -100.0..100.0f64, b in -100.0..100.0f64) {
            let domain = 17.0;
            let s = TorusPoint::new(&[a], domain);
            let y = TorusPoint::new(&[b], domain);
            let v = torus_distance(&s, &y, domain);
            prop_assert!(v >= 0.0 && v <= domain / 2.0 + 1e-12);
            prop_assert!((v - torus_distance(&y, &s, domain)).abs() < 1e-12);
        }

        #[test]
        fn triangle_inequality(
            a in 0.0..10.0f64, b in 0.0..10.0f64,
            c in 0.0..10.0f64, d in 0.0..10.0f64,
            e in 0.0..10.0f64, f in 0.0..10.0f64,
        ) {
            let dom = 10.0;
            let p = TorusPoint::new(&[a, b], dom);
            let q = TorusPoint::new(&[c, d], dom);
            let r = TorusPoint::new(&[e, f], dom);
            let pq = torus_distance(&p, &q, dom);
            let qr = torus_distance(&q, &r, dom);
            let pr = torus_distance(&p, &r, dom);
            prop_assert!(pr <= pq + qr + 1e-12);
        }

        /// |v_y(s) - v_y(x)| <= |s - x|_1 with the plain 1-norm on the right.
        #[test]
        fn lipschitz_in_the_probe(
            y in 0.0..10.0f64, s in 0.0..10.0f64, x in 0.0..10.0f64,
        ) {
            let dom = 10.0;
            let yp = TorusPoint::new(&[y], dom);
            let sp = TorusPoint::new(&[s], dom);
            let xp = TorusPoint::new(&[x], dom);
            let lhs = (torus_distance(&sp, &yp, dom) - torus_distance(&xp, &yp, dom)).abs();
            prop_assert!(lhs <= (s - x).abs() + 1e-12);
        }

        /// Shifting any coordinate by D leaves the distance unchanged.
        #[test]
        fn periodicity(a in 0.0..10.0f64, b in 0.0..10.0f64, y in 0.0..10.0f64) {
            let dom = 10.0;
            let s1 = TorusPoint::new(&[a, b], dom);
            let s2 = TorusPoint::new(&[a + dom, b], dom);
            let s3 = TorusPoint::new(&[a, b - dom], dom);
            let yp = TorusPoint::new(&[y, y], dom);
            let v = torus_distance(&s1, &yp, dom);
            prop_assert!((v - torus_distance(&s2, &yp, dom)).abs() < 1e-9);
            prop_assert!((v - torus_distance(&s3, &yp, dom)).abs() < 1e-9);
        }
    }
}
