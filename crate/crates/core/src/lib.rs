pub mod codec;
pub mod crypto;
pub mod evidence;
pub mod harness;
pub mod oram;
pub mod parties;
pub mod sharing;
pub mod time;
