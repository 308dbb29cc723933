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

#ifndef URBANLINQ_SCHEDULE_HPP
#define URBANLINQ_SCHEDULE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "fileio.hpp"
#include "scenario.hpp"

namespace ulinq {

/// Binary activation decision per link, plus the pre-rounding relaxed values
/// when a fractional solver produced them.
struct Schedule {
    std::vector<std::uint8_t> x;  // 0/1
    std::vector<double> relaxed;  // empty unless a relaxation was solved

    int n() const { return int(x.size()); }
    int active_count() const {
        int k = 0;
        for (auto v : x) k += (v != 0);
        return k;
    }
};

/// Linear-scale radio parameters shared by all links.
struct RadioParams {
    double p_lin_mw = 0.0;
    double sigma2_lin_mw = 0.0;
    double bandwidth_hz = 0.0;

    static RadioParams from_dbm(double tx_power_dbm, double noise_power_dbm,
                                double bandwidth_hz) {
        RadioParams rp{dbm_to_mw(tx_power_dbm), dbm_to_mw(noise_power_dbm), bandwidth_hz};
        rp.validate();
        return rp;
    }
    static RadioParams from_scenario(const LinkScenario& s) {
        return from_dbm(s.tx_power_dbm, s.noise_power_dbm, s.bandwidth_hz);
    }

    void validate() const {
        require(p_lin_mw > 0 && sigma2_lin_mw > 0 && bandwidth_hz > 0,
                "radio parameters must be strictly positive");
    }
};

/// SINR_i = x_i * p * g(i,i) / (sigma^2 + sum_{j != i} x_j * p * g(j,i)).
/// Accepts relaxed activations in [0,1] as well as binary ones.
inline std::vector<double> sinr(const ChannelMatrix& h, const RadioParams& rp,
                                const std::vector<double>& x) {
    require(int(x.size()) == h.n, "sinr: dimension mismatch");
    std::vector<double> out(std::size_t(h.n));
    for (int i = 0; i < h.n; ++i) {
        double interference = 0.0;
        for (int j = 0; j < h.n; ++j)
            if (j != i) interference += x[std::size_t(j)] * rp.p_lin_mw * h(j, i);
        out[std::size_t(i)] =
            x[std::size_t(i)] * rp.p_lin_mw * h.direct(i) / (rp.sigma2_lin_mw + interference);
    }
    return out;
}

inline std::vector<double> to_relaxed(const Schedule& s) {
    std::vector<double> x(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) x[i] = s.x[i] ? 1.0 : 0.0;
    return x;
}

inline std::vector<double> sinr(const ChannelMatrix& h, const RadioParams& rp,
                                const Schedule& s) {
    return sinr(h, rp, to_relaxed(s));
}

/// Total Shannon rate over active links in bits/s.
inline double sum_rate(const ChannelMatrix& h, const RadioParams& rp,
                       const std::vector<double>& x) {
    double total = 0.0;
    for (double s : sinr(h, rp, x)) total += rp.bandwidth_hz * std::log2(1.0 + s);
    return total;
}

inline double sum_rate(const ChannelMatrix& h, const RadioParams& rp, const Schedule& s) {
    return sum_rate(h, rp, to_relaxed(s));
}

inline json schedule_to_json(const Schedule& s, const std::string& solver, int iterations,
                             double sum_rate_bps) {
    json j;
    j["format"] = "urbanlinq-schedule-v1";
    j["solver"] = solver;
    j["iterations"] = iterations;
    j["sum_rate_bps"] = sum_rate_bps;
    json x = json::array();
    for (auto v : s.x) x.push_back(int(v));
    j["x"] = std::move(x);
    j["relaxed"] = s.relaxed;
    return j;
}

inline Schedule schedule_from_json(const json& j) {
    require(j.value("format", "") == "urbanlinq-schedule-v1", "not a schedule");
    Schedule s;
    for (const auto& v : j.at("x")) s.x.push_back(std::uint8_t(v.get<int>() != 0));
    s.relaxed = j.at("relaxed").get<std::vector<double>>();
    return s;
}

inline void save_schedule(const Schedule& s, const std::string& solver, int iterations,
                          double sum_rate_bps, const std::filesystem::path& path) {
    write_json_file(path, schedule_to_json(s, solver, iterations, sum_rate_bps));
}

inline Schedule load_schedule(const std::filesystem::path& path) {
    return schedule_from_json(read_json_file(path));
}

} // namespace ulinq

#endif
