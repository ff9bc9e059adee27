//! Domain critical risk indicators: climate, hydrology, ecology,
//! electric-energy reliability, finance and space weather.

mod ecology;
mod finance;
mod reliability;
mod space_weather;
mod spi;

pub use ecology::{lpi, shannon_index, simpson_index, AbundancePanel, ZeroPolicy};
pub use finance::{equal_weighted_index, vix_from_chain, OptionChain, OptionQuote};
pub use reliability::{
    monthly_reliability, reserve_margin, reserve_margin_series, saidi, saifi, CustomerBase,
    InterruptionRecord, ReliabilityIndex, ReserveMarginInputs, TimeWindow, SUSTAINED_MINUTES,
};
pub use space_weather::{exceedance_events, ExceedanceEvent};
pub use spi::{
    fit_zero_inflated_gamma, spi, spi_with, FitMethod, SpiOptions, SpiResult, ZeroInflatedGamma,
    SPI_SCALES,
};
