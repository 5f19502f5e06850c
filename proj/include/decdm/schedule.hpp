#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace decdm {

enum class ScheduleKind { linear_beta, cosine };

std::string_view schedule_kind_name(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Cumulative signal retention alpha_t for t = 0..T.
///
/// alpha_0 = 1, alpha_T <= 1e-4 and the sequence is strictly decreasing. Values
/// are held at float32 precision so a checkpoint stores them without loss.
class NoiseSchedule {
public:
    NoiseSchedule() = default;
    /// Validates the invariants; throws ConfigError when they do not hold.
    explicit NoiseSchedule(std::vector<double> alphas_cum);

    int horizon() const { return static_cast<int>(alphas_.size()) - 1; }
    double alpha(int t) const;
    /// sqrt(1 - alpha_t) / sqrt(alpha_t): the noise scale in x / sqrt(alpha) coordinates.
    double sigma(int t) const;
    const std::vector<double>& alphas_cum() const { return alphas_; }

    /// SHA-256 over the little-endian float32 encoding of alphas_cum.
    std::string hash() const;

    friend bool operator==(const NoiseSchedule&, const NoiseSchedule&) = default;

private:
    std::vector<double> alphas_;
};

/// linear_beta: beta linearly spaced in [1e-4, 2e-2], alpha_t = prod(1 - beta_i).
/// cosine: squared-cosine alpha with offset 0.008 and betas capped at 0.999.
/// Either way the terminal value is floored to at most 1e-4.
NoiseSchedule make_schedule(int T, ScheduleKind kind = ScheduleKind::linear_beta);

}  // namespace decdm
