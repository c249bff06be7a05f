/// Monotonic time source in seconds.
///
/// The core crate has no access to the operating system clock, so callers
/// that want a wall-clock time budget pass an implementation in.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances. Searches using it never time out.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now(&self) -> f64 {
        (**self).now()
    }
}
