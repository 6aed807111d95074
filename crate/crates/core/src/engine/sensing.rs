//! Sensor views.

use super::{Capabilities, EngineError, RobotId, World};
use crate::grid::{Cell, Direction, Offset};

/// Contents of one sensed cell. Walls, settled robots and active robots all
/// read as obstacles; only a broadcast payload tells them apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sensed {
    pub obstacle: bool,
    pub source: bool,
    pub broadcast: Option<u8>,
}

/// What a robot sees: cells within its Manhattan radius, addressed by offset.
/// The view exposes no coordinates and no robot identities.
pub struct SensorView<'w> {
    world: &'w World,
    origin: Cell,
    radius: u32,
    broadcasts: bool,
}

impl core::fmt::Debug for SensorView<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SensorView")
            .field("radius", &self.radius)
            .finish_non_exhaustive()
    }
}

impl SensorView<'_> {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// The cell at `o`, or `None` beyond the sensing radius.
    #[inline]
    pub fn at(&self, o: Offset) -> Option<Sensed> {
        if o.norm1() > self.radius {
            return None;
        }
        let c = self.origin + o;
        let (obstacle, occupant) = match self.world.env().region().index(c) {
            None => (true, None),
            Some(slot) => {
                let occupant = self.world.occupant_at_slot(slot);
                (occupant.is_some(), occupant)
            }
        };
        let broadcast = if self.broadcasts {
            occupant.and_then(|r| self.world.robot(r).broadcast)
        } else {
            None
        };
        Some(Sensed {
            obstacle,
            source: c == self.world.env().source(),
            broadcast,
        })
    }

    /// The adjacent cell in direction `d`. Radius zero sees nothing, so every
    /// neighbor then reads as an obstacle.
    #[inline]
    pub fn toward(&self, d: Direction) -> Sensed {
        self.at(d.offset()).unwrap_or(Sensed {
            obstacle: true,
            source: false,
            broadcast: None,
        })
    }

    #[inline]
    pub fn blocked(&self, d: Direction) -> bool {
        self.toward(d).obstacle
    }

    /// Every offset inside the view.
    pub fn offsets(&self) -> impl Iterator<Item = Offset> {
        let r = self.radius as i32;
        (-r..=r).flat_map(move |dy| {
            let span = r - dy.abs();
            (-span..=span).map(move |dx| Offset::new(dx, dy))
        })
    }
}

/// View of active robot `robot` under `caps`.
pub fn sense(
    world: &World,
    robot: RobotId,
    caps: Capabilities,
) -> Result<SensorView<'_>, EngineError> {
    let r = world
        .robots()
        .get(robot)
        .ok_or(EngineError::UnknownRobot(robot))?;
    if r.settled {
        return Err(EngineError::RobotSettled(robot));
    }
    Ok(SensorView {
        world,
        origin: r.pos,
        radius: caps.sensing.unwrap_or(u32::MAX / 4),
        broadcasts: caps.broadcast_bits > 0,
    })
}
