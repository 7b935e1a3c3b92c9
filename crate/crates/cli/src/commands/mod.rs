mod decomp;
mod forests;
mod gs;
mod transfer;

use crate::registry::Registry;

pub fn registry() -> Registry {
    let mut r = Registry::new();
    r.register(Box::new(decomp::Verify));
    r.register(Box::new(transfer::Transfer));
    r.register(Box::new(transfer::VarietyTransfer));
    r.register(Box::new(transfer::QuotientTransfer));
    r.register(Box::new(decomp::Match));
    r.register(Box::new(decomp::Normalize));
    r.register(Box::new(forests::ForestSim));
    r.register(Box::new(forests::ForestCheck));
    r.register(Box::new(forests::Theta));
    r.register(Box::new(forests::Tarski56));
    r.register(Box::new(gs::GsCheck));
    r.register(Box::new(gs::PDef));
    r.register(Box::new(gs::PtpBound));
    r.register(Box::new(gs::GenPresentation));
    r.register(Box::new(gs::WreathCheck));
    r
}
