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

#ifndef URBANLINQ_COMMON_HPP
#define URBANLINQ_COMMON_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace ulinq {

/// Thrown on invalid inputs (bad parameters, malformed files, violated
/// preconditions). CLI maps it to a nonzero exit code.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

/// 2-D point in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Linear power gain to dB, with a tiny clamp so exact zeros stay finite.
inline double linear_to_db(double g) {
    return 10.0 * std::log10(std::max(g, 1e-300));
}

} // namespace ulinq

#endif
