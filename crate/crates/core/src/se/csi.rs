//! Channel knowledge available to the combiner.

use num_complex::Complex64;

use super::CsiQuality;
use crate::channel::ChannelRealization;

#[derive(Debug, Clone, PartialEq)]
pub struct CsiView {
    pub h_hat: Vec<Complex64>,
    pub quality: CsiQuality,
}

pub fn csi_view(truth: &ChannelRealization, quality: CsiQuality) -> CsiView {
    let h_hat = match quality {
        CsiQuality::Perfect => truth.h.clone(),
        CsiQuality::Statistical => truth.los_mean(),
    };
    CsiView { h_hat, quality }
}
