pub use ahss_core;
