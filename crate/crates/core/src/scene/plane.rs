use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// Plane `normal . x = offset` in camera space (millimeters).
///
/// The normal is oriented so the camera origin lies on the negative side,
/// i.e. `offset > 0`; [`Plane::height`] is therefore positive for points
/// between the plane and the camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
    pub vertices: [Point3<f64>; 3],
}

impl Plane {
    /// Signed distance towards the camera.
    pub fn height(&self, p: &Point3<f64>) -> f64 {
        self.offset - self.normal.dot(&p.coords)
    }

    pub fn residual(&self, p: &Point3<f64>) -> f64 {
        (self.normal.dot(&p.coords) - self.offset).abs()
    }
}

/// Plane through three points.
pub fn fit_plane(p1: Point3<f64>, p2: Point3<f64>, p3: Point3<f64>) -> Result<Plane> {
    let e1 = p2 - p1;
    let e2 = p3 - p1;
    let cross = e1.cross(&e2);
    let scale = e1.norm() * e2.norm();
    if !(scale > 0.0) || cross.norm() < 1e-9 * scale {
        return Err(Error::DegeneratePlane(format!(
            "points {p1:?}, {p2:?}, {p3:?} are collinear"
        )));
    }
    let mut normal = cross.normalize();
    let mut offset = (normal.dot(&p1.coords) + normal.dot(&p2.coords) + normal.dot(&p3.coords)) / 3.0;
    if offset.abs() <= 1e-12 * p1.coords.norm().max(1.0) {
        return Err(Error::DegeneratePlane(
            "plane passes through the camera center".into(),
        ));
    }
    if offset < 0.0 {
        normal = -normal;
        offset = -offset;
    }
    Ok(Plane {
        normal,
        offset,
        vertices: [p1, p2, p3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned() {
        let p = fit_plane(
            Point3::new(0.0, 0.0, 500.0),
            Point3::new(100.0, 0.0, 500.0),
            Point3::new(0.0, 100.0, 500.0),
        )
        .unwrap();
        assert_eq!(p.normal, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(p.offset, 500.0);
        assert!(p.height(&Point3::origin()) > 0.0);
    }

    #[test]
    fn orientation_independent_of_vertex_order() {
        let p = fit_plane(
            Point3::new(0.0, 0.0, 500.0),
            Point3::new(0.0, 100.0, 500.0),
            Point3::new(100.0, 0.0, 500.0),
        )
        .unwrap();
        assert_eq!(p.normal, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(p.offset, 500.0);
    }

    #[test]
    fn collinear_points() {
        let r = fit_plane(
            Point3::new(0.0, 0.0, 400.0),
            Point3::new(10.0, 10.0, 410.0),
            Point3::new(30.0, 30.0, 430.0),
        );
        assert!(matches!(r, Err(Error::DegeneratePlane(_))));
        let same = Point3::new(1.0, 2.0, 3.0);
        assert!(fit_plane(same, same, Point3::new(5.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn tilted_plane_contains_vertices() {
        let pts = [
            Point3::new(0.0, 0.0, 400.0),
            Point3::new(100.0, 0.0, 420.0),
            Point3::new(0.0, 100.0, 440.0),
        ];
        let p = fit_plane(pts[0], pts[1], pts[2]).unwrap();
        assert!((p.normal.norm() - 1.0).abs() < 1e-9);
        for v in &pts {
            assert!(p.residual(v) <= 1e-6);
        }
        // normal is proportional to (-0.2, -0.4, 1)
        let expected = Vector3::new(-0.2, -0.4, 1.0).normalize();
        assert!((p.normal - expected).norm() < 1e-12);
        assert!(p.offset > 0.0);
    }
}
