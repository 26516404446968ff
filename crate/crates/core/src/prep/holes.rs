use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::raster::DefinitionMap;

/// Pixel adjacency used when grouping undefined pixels into holes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            v => Err(format!("connectivity must be 4 or 8, got {v}")),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

/// Connected undefined regions of a definition map.
///
/// Label 0 marks a defined pixel; holes are numbered from 1 in the row-major
/// order of their first pixel. A hole touching the raster border is a
/// background hole, every other hole is a near-object hole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleLabeling {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    // indexed by label; entry 0 unused
    background: Vec<bool>,
}

impl HoleLabeling {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn hole_count(&self) -> usize {
        self.background.len() - 1
    }

    pub fn is_background(&self, id: u32) -> bool {
        id != 0 && self.background[id as usize]
    }

    pub fn background_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.background
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
    }
}

/// Label the maximal connected sets of undefined pixels and flag those that
/// touch the raster border.
pub fn classify_holes(definition: &DefinitionMap, connectivity: Connectivity) -> HoleLabeling {
    let (w, h) = definition.dims();
    let defined = definition.data();
    let mut labels = vec![0u32; w * h];
    let mut background = vec![false];
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if defined[start] || labels[start] != 0 {
            continue;
        }
        let id = background.len() as u32;
        let mut touches_border = false;
        labels[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            touches_border |= r == 0 || c == 0 || r + 1 == h || c + 1 == w;
            for &(dr, dc) in connectivity.offsets() {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if !defined[j] && labels[j] == 0 {
                    labels[j] = id;
                    queue.push_back(j);
                }
            }
        }
        background.push(touches_border);
    }
    HoleLabeling {
        width: w,
        height: h,
        labels,
        background,
    }
}
