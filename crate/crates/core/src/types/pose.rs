use serde::{Deserialize, Serialize};

/// Planar agent state. Heading is in degrees, 0° along +y, increasing
/// clockwise, and always kept in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPose")]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    heading: f64,
}

#[derive(Deserialize)]
struct RawPose {
    x: f64,
    y: f64,
    heading: f64,
}

impl From<RawPose> for Pose {
    fn from(raw: RawPose) -> Self {
        Pose::new(raw.x, raw.y, raw.heading)
    }
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose {
            x,
            y,
            heading: normalize_heading(heading),
        }
    }

    pub fn origin() -> Self {
        Pose::new(0.0, 0.0, 0.0)
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn with_heading(self, heading: f64) -> Self {
        Pose::new(self.x, self.y, heading)
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub(crate) fn normalize_heading(h: f64) -> f64 {
    let r = h.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}
