/*
 * Copyright 2026 the urbanlinq authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef URBANLINQ_PATHLOSS_HPP
#define URBANLINQ_PATHLOSS_HPP

#include <cmath>

#include "common.hpp"

namespace ulinq {

/// Free-space path loss in dB: 20*log10(d) + 20*log10(f) - 147.55, with the
/// distance clamped below at 1 m. d in meters, f in Hz.
inline double fspl_db(double d_m, double f_hz) {
    return 20.0 * std::log10(std::max(d_m, 1.0)) + 20.0 * std::log10(f_hz) - 147.55;
}

// generalized free-space loss with a configurable distance exponent
inline double fspl_db_exp(double d_m, double f_hz, double exponent) {
    return 10.0 * exponent * std::log10(std::max(d_m, 1.0)) + 20.0 * std::log10(f_hz) - 147.55;
}

/// Short-range outdoor two-slope model: exponent n_before up to the
/// breakpoint distance, n_after beyond it, continuous at the breakpoint.
struct Itu1411Params {
    double f_carrier_hz = 5.9e9;
    double breakpoint_m = 40.0;
    double n_before = 2.0;
    double n_after = 4.0;
};

/// Returns the path gain in dB (<= 0 in any sensible configuration).
inline double itu1411_gain_db(double d_m, const Itu1411Params& p = {}) {
    require(d_m > 0.0, "itu1411: distance must be > 0");
    double loss = fspl_db_exp(std::min(d_m, p.breakpoint_m), p.f_carrier_hz, p.n_before) +
                  10.0 * p.n_after * std::log10(std::max(d_m / p.breakpoint_m, 1.0));
    return -loss;
}

} // namespace ulinq

#endif
