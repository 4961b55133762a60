//! Scalar abstraction for the elemental kernels.
//!
//! Kernels are generic over [`KernelScalar`] so the same code runs on `f64` and on
//! [`Counted`], which tallies every arithmetic operation it performs.

use std::cell::Cell;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait KernelScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Loads a constant (table entry, geometric factor); not an arithmetic operation.
    fn lit(x: f64) -> Self;
    fn value(self) -> f64;
    fn abs(self) -> Self;
    fn max(self, other: Self) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::lit(0.0)
    }
}

impl KernelScalar for f64 {
    #[inline(always)]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn value(self) -> f64 {
        self
    }
    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline(always)]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
}

thread_local! {
    static FLOPS: Cell<u64> = const { Cell::new(0) };
}

/// Resets the calling thread's operation counter.
pub fn reset_flops() {
    FLOPS.with(|c| c.set(0));
}

/// Operations performed by [`Counted`] values on the calling thread since the last reset.
pub fn flops() -> u64 {
    FLOPS.with(|c| c.get())
}

#[inline]
fn tick() {
    FLOPS.with(|c| c.set(c.get() + 1));
}

/// `f64` wrapper counting add, sub, mul, div, abs and max. Negation is a sign flip
/// and is not counted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Counted(pub f64);

impl Add for Counted {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        tick();
        Counted(self.0 + o.0)
    }
}

impl Sub for Counted {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        tick();
        Counted(self.0 - o.0)
    }
}

impl Mul for Counted {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        tick();
        Counted(self.0 * o.0)
    }
}

impl Div for Counted {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        tick();
        Counted(self.0 / o.0)
    }
}

impl Neg for Counted {
    type Output = Self;
    fn neg(self) -> Self {
        Counted(-self.0)
    }
}

impl KernelScalar for Counted {
    fn lit(x: f64) -> Self {
        Counted(x)
    }
    fn value(self) -> f64 {
        self.0
    }
    fn abs(self) -> Self {
        tick();
        Counted(self.0.abs())
    }
    fn max(self, o: Self) -> Self {
        tick();
        Counted(self.0.max(o.0))
    }
}

/// Wraps a slice of plain values for a counted kernel run.
pub fn counted(values: &[f64]) -> Vec<Counted> {
    values.iter().map(|&v| Counted(v)).collect()
}
