#pragma once

#include "uwr/volume.hpp"

namespace uwr {

// ||estimate - reference||^2 / ||reference||^2 on complex values.
// Throws Error(ZeroReference) if the reference is identically zero.
double nmse(const ComplexVolume& estimate, const ComplexVolume& reference);

// Same quantity pooled over every frame of a series.
double nmse(const VolumeSeries& estimate, const VolumeSeries& reference);

// NMSE on voxel magnitudes |.| instead of complex values.
double nmse_magnitude(const ComplexVolume& estimate, const ComplexVolume& reference);

// Peak SNR in dB: 10 log10(max|ref|^2 / MSE). +inf when the MSE is zero.
double psnr(const ComplexVolume& estimate, const ComplexVolume& reference);
double psnr_magnitude(const ComplexVolume& estimate, const ComplexVolume& reference);

}  // namespace uwr
