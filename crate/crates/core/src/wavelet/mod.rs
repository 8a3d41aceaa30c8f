//! Compactly supported orthonormal wavelets: tables, property (R), offset
//! schedules and periodic transforms.

mod dwt;
mod property;
mod spec;
pub mod taps;

pub use dwt::{dwt_periodic, idwt_periodic, PeriodicDwt};
pub use property::{
    certify, check_property_r, find_offset_schedule, recertify, OffsetSchedule, PropertyReport, ScheduleSearch,
};
pub use spec::{WaveletSpec, DEFAULT_RESOLUTION};
