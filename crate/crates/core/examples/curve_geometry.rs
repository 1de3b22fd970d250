//! Arc length, chordal parametrization and projection onto a digitized coast.
//!
//! ```text
//! cargo run --release --example curve_geometry
//! ```

use std::f64::consts::{PI, TAU};

use coastal_kriging::curvegeom::{cumulative_chord_length, GeoPoint, GeoProjection};
use coastal_kriging::{ParametricCurve, PlanePoint, Polyline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // exact arc length against the chordal approximation on the study ellipse
    let ellipse = ParametricCurve::ellipse(2.0, 1.0, 0.0, TAU)?;
    let perimeter = ellipse.arc_length(0.0, TAU)?;
    println!("ellipse (2, 1) perimeter {perimeter:.10}");
    for m in [8, 32, 128, 1024] {
        let pts: Vec<PlanePoint> = (0..=m).map(|i| ellipse.point_at(TAU * i as f64 / m as f64)).collect();
        let chord = *cumulative_chord_length(&pts).last().unwrap();
        println!("  {m:>5} chords: {chord:.10} (short by {:.2e})", perimeter - chord);
    }

    // two points facing each other across the minor axis
    let (p, q) = (ellipse.point_at(PI / 2.0), ellipse.point_at(3.0 * PI / 2.0));
    println!(
        "top to bottom: straight line {:.3}, along the shore {:.3}",
        p.distance(&q),
        ellipse.arc_length(PI / 2.0, 3.0 * PI / 2.0)?
    );

    // a lon/lat coastline projected to kilometres, and an offshore sample
    let coast_ll = [(-89.45, 30.290), (-89.42, 30.305), (-89.39, 30.290), (-89.36, 30.275), (-89.33, 30.290)];
    let geo: Vec<GeoPoint> = coast_ll.iter().map(|&(lon, lat)| GeoPoint::new(lon, lat)).collect::<Result<_, _>>()?;
    let proj = GeoProjection::centered_on(&geo)?;
    let coast = Polyline::new(geo.iter().map(|g| proj.project(g)).collect())?;
    println!("coastline length {:.3} km", coast.total_length());
    let sample = proj.project(&GeoPoint::new(-89.40, 30.301)?);
    let foot = coast.project(&sample);
    println!(
        "sample at ({:.3}, {:.3}) km lies {:.3} km offshore, t = {:.3} km along the coast",
        sample.x, sample.y, foot.dist, foot.t
    );
    Ok(())
}
