use nalgebra::{Point3, Vector3};

use super::ObjectKind;

const T_MIN: f64 = 1e-9;
const MARCH_STEPS: usize = 96;
const BISECTIONS: usize = 50;

/// An object in its own orthonormal frame, centered at `center` with half
/// extents `half` along `axes`.
#[derive(Clone, Debug)]
pub struct Solid {
    kind: ObjectKind,
    center: Point3<f64>,
    axes: [Vector3<f64>; 3],
    half: Vector3<f64>,
}

impl Solid {
    pub fn new(kind: ObjectKind, center: Point3<f64>, axes: [Vector3<f64>; 3], half: Vector3<f64>) -> Self {
        Self { kind, center, axes, half }
    }

    fn to_local(&self, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(self.axes[0].dot(v), self.axes[1].dot(v), self.axes[2].dot(v))
    }

    fn to_world(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.axes[0] * v.x + self.axes[1] * v.y + self.axes[2] * v.z
    }

    pub fn bounding_corners(&self) -> Vec<Point3<f64>> {
        (0..8)
            .map(|i| {
                let s = |b: usize| if i >> b & 1 == 1 { 1.0 } else { -1.0 };
                self.center + self.to_world(&Vector3::new(s(0) * self.half.x, s(1) * self.half.y, s(2) * self.half.z))
            })
            .collect()
    }

    /// First intersection of `origin + t * dir` with the surface, `t > 0`,
    /// with the outward unit normal there.
    pub fn intersect(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<(f64, Vector3<f64>)> {
        let o = self.to_local(&(origin - self.center));
        let d = self.to_local(dir);
        let (t, n) = match self.kind {
            ObjectKind::Box => self.slab(&o, &d).map(|(t0, _, n)| (t0, n))?,
            ObjectKind::Sphere => self.ellipsoid(&o, &d)?,
            ObjectKind::Superellipsoid => self.superellipsoid(&o, &d)?,
        };
        Some((t, self.to_world(&n).normalize()))
    }

    /// Entry and exit of the bounding box, and the normal of the entry face.
    fn slab(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<(f64, f64, Vector3<f64>)> {
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut normal = Vector3::zeros();
        for i in 0..3 {
            let h = self.half[i];
            if d[i] == 0.0 {
                if o[i].abs() > h {
                    return None;
                }
                continue;
            }
            let (a, b) = ((-h - o[i]) / d[i], (h - o[i]) / d[i]);
            let (near, far) = if a < b { (a, b) } else { (b, a) };
            if near > t0 {
                t0 = near;
                normal = Vector3::zeros();
                normal[i] = -d[i].signum();
            }
            t1 = t1.min(far);
        }
        (t0 <= t1 && t0 > T_MIN).then_some((t0, t1, normal))
    }

    fn ellipsoid(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<(f64, Vector3<f64>)> {
        let os = o.component_div(&self.half);
        let ds = d.component_div(&self.half);
        let a = ds.norm_squared();
        let b = 2.0 * os.dot(&ds);
        let c = os.norm_squared() - 1.0;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let t = (-b - disc.sqrt()) / (2.0 * a);
        if t <= T_MIN {
            return None;
        }
        let p = o + t * d;
        Some((t, p.component_div(&self.half.component_mul(&self.half))))
    }

    fn implicit(&self, p: &Vector3<f64>) -> f64 {
        p.component_div(&self.half).iter().map(|v| v.powi(4)).sum::<f64>() - 1.0
    }

    fn superellipsoid(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<(f64, Vector3<f64>)> {
        let (t0, t1, _) = self.slab(o, d)?;
        let step = (t1 - t0) / MARCH_STEPS as f64;
        let mut lo = t0;
        let mut hi = None;
        for i in 1..=MARCH_STEPS {
            let t = t0 + step * i as f64;
            if self.implicit(&(o + t * d)) <= 0.0 {
                hi = Some(t);
                break;
            }
            lo = t;
        }
        let mut hi = hi?;
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if self.implicit(&(o + mid * d)) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p = o + hi * d;
        let grad = p.component_div(&self.half).map(|v| v.powi(3)).component_div(&self.half);
        Some((hi, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(kind: ObjectKind) -> Solid {
        Solid::new(kind, Point3::new(0.0, 0.0, 100.0), [Vector3::x(), Vector3::y(), Vector3::z()], Vector3::new(10.0, 20.0, 5.0))
    }

    #[test]
    fn axis_ray_hits_each_kind_at_the_top() {
        for kind in ObjectKind::ALL {
            let (t, n) = solid(kind).intersect(&Point3::origin(), &Vector3::z()).unwrap();
            assert!((t - 95.0).abs() < 1e-9, "{kind:?}: {t}");
            assert!((n - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn corners_and_misses() {
        let s = solid(ObjectKind::Sphere);
        // inside the box corner, outside the ellipsoid
        let dir = Vector3::new(9.5, 19.5, 100.0);
        assert!(s.intersect(&Point3::origin(), &dir).is_none());
        assert!(solid(ObjectKind::Box).intersect(&Point3::origin(), &dir).is_some());
        assert!(solid(ObjectKind::Superellipsoid).intersect(&Point3::origin(), &dir).is_none());
        assert_eq!(s.bounding_corners().len(), 8);
    }
}
