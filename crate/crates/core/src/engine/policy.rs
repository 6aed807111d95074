//! Policies, capabilities and the register-backed local rule adapter.

use core::fmt;

use super::sensing::{sense, SensorView};
use super::{EngineError, RobotId, World};
use crate::grid::Direction;

/// What a robot may sense, broadcast and remember.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capabilities {
    /// Manhattan sensing radius. `None` means the whole world.
    pub sensing: Option<u32>,
    /// Bits broadcast per step.
    pub broadcast_bits: u32,
    /// Persistent state bits. `None` means unbounded.
    pub state_bits: Option<u32>,
}

impl Capabilities {
    pub const fn local(sensing: u32, broadcast_bits: u32, state_bits: u32) -> Self {
        Capabilities {
            sensing: Some(sensing),
            broadcast_bits,
            state_bits: Some(state_bits),
        }
    }

    /// Omniscient controller.
    pub const fn global() -> Self {
        Capabilities {
            sensing: None,
            broadcast_bits: 0,
            state_bits: None,
        }
    }

    /// Whether `payload` fits in the broadcast budget.
    pub fn allows_broadcast(&self, payload: u8) -> bool {
        self.broadcast_bits > 0
            && (self.broadcast_bits >= 8 || (payload as u32) < (1u32 << self.broadcast_bits))
    }
}

impl fmt::Display for Capabilities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<u32>| match v {
            Some(v) => alloc::format!("{v}"),
            None => alloc::string::String::from("inf"),
        };
        write!(
            f,
            "({},{},{})",
            show(self.sensing),
            self.broadcast_bits,
            show(self.state_bits)
        )
    }
}

/// Physical part of a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Move(Direction),
    Settle,
    Wait,
}

/// One robot's output for one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    /// Payload emitted after acting; `None` leaves the previous payload in place.
    pub broadcast: Option<u8>,
    /// State persisted to the next step.
    pub register: u32,
}

impl Decision {
    pub fn new(action: Action) -> Decision {
        Decision {
            action,
            broadcast: None,
            register: 0,
        }
    }
}

/// A controller for every robot in the world.
pub trait Policy {
    fn name(&self) -> &'static str;

    fn capabilities(&self) -> Capabilities;

    /// Payload a freshly entered robot shows before its first decision.
    fn entry_broadcast(&self) -> Option<u8> {
        None
    }

    /// Called once per step before any decision, with the step-start world.
    fn begin_step(&mut self, _world: &World) {}

    /// Decision of awake robot `robot` against the step-start world.
    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError>;

    /// Current primary direction of an active robot, if the policy has one.
    fn heading(&self, _world: &World, _robot: RobotId) -> Option<Direction> {
        None
    }
}

/// Fixed-width persistent state.
pub trait Register: Copy {
    const BITS: u32;
    fn encode(self) -> u32;
    fn decode(bits: u32) -> Self;
}

/// A decentralized rule that sees only its sensor view and its register.
pub trait LocalRule {
    type State: Register;
    const NAME: &'static str;
    const CAPABILITIES: Capabilities;

    fn entry_broadcast(&self) -> Option<u8> {
        None
    }

    /// Returns the action and optional broadcast, updating `state` in place.
    fn step(&self, view: &SensorView<'_>, state: &mut Self::State) -> (Action, Option<u8>);

    fn heading(state: Self::State) -> Option<Direction>;
}

/// Runs a [`LocalRule`] on every robot. The robot's register is the only
/// memory carried between steps, and it is checked against the state budget.
#[derive(Clone, Debug, Default)]
pub struct Local<R>(pub R);

impl<R: LocalRule> Policy for Local<R> {
    fn name(&self) -> &'static str {
        R::NAME
    }

    fn capabilities(&self) -> Capabilities {
        R::CAPABILITIES
    }

    fn entry_broadcast(&self) -> Option<u8> {
        self.0.entry_broadcast()
    }

    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError> {
        let caps = R::CAPABILITIES;
        if let Some(s) = caps.state_bits {
            if R::State::BITS > s {
                return Err(EngineError::CapabilityViolation {
                    robot,
                    what: "register wider than state budget",
                });
            }
        }
        let view = sense(world, robot, caps)?;
        let mut state = R::State::decode(world.robot(robot).register);
        let (action, broadcast) = self.0.step(&view, &mut state);
        let register = state.encode();
        if let Some(s) = caps.state_bits {
            if s < 32 && register >> s != 0 {
                return Err(EngineError::CapabilityViolation {
                    robot,
                    what: "persisted state exceeds budget",
                });
            }
        }
        Ok(Decision {
            action,
            broadcast,
            register,
        })
    }

    fn heading(&self, world: &World, robot: RobotId) -> Option<Direction> {
        R::heading(R::State::decode(world.robot(robot).register))
    }
}
