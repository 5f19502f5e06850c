#include "decdm/schedule.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "decdm/error.hpp"
#include "decdm/hashing.hpp"

namespace decdm {

namespace {

constexpr double kTerminalAlphaMax = 1e-4;

}  // namespace

std::string_view schedule_kind_name(ScheduleKind kind) {
    return kind == ScheduleKind::linear_beta ? "linear-beta" : "cosine";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
    if (name == "linear-beta" || name == "linear") return ScheduleKind::linear_beta;
    if (name == "cosine") return ScheduleKind::cosine;
    throw ConfigError("unknown schedule kind '" + std::string(name) + "' (expected linear-beta or cosine)");
}

NoiseSchedule::NoiseSchedule(std::vector<double> alphas_cum) : alphas_(std::move(alphas_cum)) {
    if (alphas_.size() < 3) throw ConfigError("schedule needs T >= 2");
    if (alphas_.front() != 1.0) throw ConfigError("schedule must start at alpha_0 = 1");
    if (!(alphas_.back() > 0.0 && alphas_.back() <= kTerminalAlphaMax))
        throw ConfigError("terminal alpha must lie in (0, 1e-4]");
    for (std::size_t t = 1; t < alphas_.size(); ++t)
        if (!(alphas_[t] < alphas_[t - 1]))
            throw ConfigError("schedule not strictly decreasing at t=" + std::to_string(t));
}

double NoiseSchedule::alpha(int t) const {
    if (t < 0 || t > horizon()) throw ConfigError("timestep " + std::to_string(t) + " outside [0, T]");
    return alphas_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::sigma(int t) const {
    const double a = alpha(t);
    return std::sqrt(1.0 - a) / std::sqrt(a);
}

std::string NoiseSchedule::hash() const {
    std::vector<unsigned char> bytes;
    bytes.reserve(alphas_.size() * 4);
    for (double a : alphas_) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(a));
        for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<unsigned char>(bits >> (8 * k)));
    }
    return sha256_hex(bytes);
}

NoiseSchedule make_schedule(int T, ScheduleKind kind) {
    if (T < 2) throw ConfigError("schedule needs T >= 2, got " + std::to_string(T));
    std::vector<double> alphas(static_cast<std::size_t>(T) + 1);
    alphas[0] = 1.0;
    if (kind == ScheduleKind::linear_beta) {
        constexpr double lo = 1e-4, hi = 2e-2;
        double acc = 1.0;
        for (int t = 1; t <= T; ++t) {
            const double beta = lo + (hi - lo) * (t - 1) / (T - 1);
            acc *= 1.0 - beta;
            alphas[static_cast<std::size_t>(t)] = acc;
        }
    } else {
        constexpr double s = 0.008;
        auto f = [&](int t) {
            const double c = std::cos((static_cast<double>(t) / T + s) / (1.0 + s) * std::numbers::pi / 2.0);
            return c * c;
        };
        double acc = 1.0;
        for (int t = 1; t <= T; ++t) {
            const double beta = std::min(1.0 - f(t) / f(t - 1), 0.999);
            acc *= 1.0 - beta;
            alphas[static_cast<std::size_t>(t)] = acc;
        }
    }
    for (double& a : alphas) a = static_cast<float>(a);
    alphas.back() = std::min(alphas.back(), static_cast<double>(static_cast<float>(kTerminalAlphaMax)));
    if (alphas.back() > kTerminalAlphaMax) alphas.back() = std::nextafter(static_cast<float>(kTerminalAlphaMax), 0.0f);
    return NoiseSchedule(std::move(alphas));
}

}  // namespace decdm
