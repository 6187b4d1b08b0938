#pragma once

// Theta-parameterized duration generators. Families that consume randomness
// are sampled by inversion (Erlang as a sum of inversion-sampled
// exponentials), so every duration is a nondecreasing function of each
// underlying uniform — the property antithetic pairing and common random
// numbers rely on. A distribution may bind one theta coordinate as a scale
// factor; the tangent of a scaled draw with respect to that coordinate is the
// unscaled base draw.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqsim/random.hpp"
#include "rqsim/time_algebra.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

enum class DistFamily { constant, exponential, uniform, erlang, sequence };

inline const char* to_string(DistFamily f) {
    switch (f) {
        case DistFamily::constant: return "constant";
        case DistFamily::exponential: return "exponential";
        case DistFamily::uniform: return "uniform";
        case DistFamily::erlang: return "erlang";
        case DistFamily::sequence: return "sequence";
    }
    return "?";
}

struct DistributionSpec {
    DistFamily family = DistFamily::constant;
    double value = 0.0;          // constant
    double rate = 1.0;           // exponential, erlang
    int shape = 1;               // erlang
    double low = 0.0;            // uniform
    double high = 1.0;           // uniform
    std::vector<double> items;   // sequence (cycled when shorter than the request)
    int theta_index = -1;        // < 0: unscaled; otherwise scaled by theta[theta_index]

    static DistributionSpec constant(double v, int theta = -1) {
        DistributionSpec d;
        d.family = DistFamily::constant;
        d.value = v;
        d.theta_index = theta;
        return d;
    }
    static DistributionSpec exponential(double rate, int theta = -1) {
        DistributionSpec d;
        d.family = DistFamily::exponential;
        d.rate = rate;
        d.theta_index = theta;
        return d;
    }
    static DistributionSpec uniform(double low, double high, int theta = -1) {
        DistributionSpec d;
        d.family = DistFamily::uniform;
        d.low = low;
        d.high = high;
        d.theta_index = theta;
        return d;
    }
    static DistributionSpec erlang(int shape, double rate, int theta = -1) {
        DistributionSpec d;
        d.family = DistFamily::erlang;
        d.shape = shape;
        d.rate = rate;
        d.theta_index = theta;
        return d;
    }
    static DistributionSpec sequence(std::vector<double> items, int theta = -1) {
        DistributionSpec d;
        d.family = DistFamily::sequence;
        d.items = std::move(items);
        d.theta_index = theta;
        return d;
    }
};

inline void validate(const DistributionSpec& spec) {
    switch (spec.family) {
        case DistFamily::constant:
            if (spec.value < 0) throw std::invalid_argument("constant: negative value");
            break;
        case DistFamily::exponential:
            if (!(spec.rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
            break;
        case DistFamily::uniform:
            if (spec.low < 0 || spec.high < spec.low)
                throw std::invalid_argument("uniform: need 0 <= low <= high");
            break;
        case DistFamily::erlang:
            if (spec.shape < 1) throw std::invalid_argument("erlang: shape must be >= 1");
            if (!(spec.rate > 0)) throw std::invalid_argument("erlang: rate must be > 0");
            break;
        case DistFamily::sequence:
            if (spec.items.empty()) throw std::invalid_argument("sequence: no items");
            for (double x : spec.items)
                if (x < 0) throw std::invalid_argument("sequence: negative item");
            break;
    }
}

// All current families are inversion-sampled (or consume no randomness), the
// precondition for antithetic pairing.
inline bool is_inversion_monotone(const DistributionSpec&) { return true; }

namespace detail {

inline double theta_scale(const DistributionSpec& spec, std::span<const double> theta) {
    if (spec.theta_index < 0) return 1.0;
    if (spec.theta_index >= static_cast<int>(theta.size()))
        throw std::invalid_argument("distribution binds theta[" +
                                    std::to_string(spec.theta_index) + "] but theta has " +
                                    std::to_string(theta.size()) + " coordinates");
    double s = theta[static_cast<size_t>(spec.theta_index)];
    if (s < 0)
        throw std::invalid_argument("theta[" + std::to_string(spec.theta_index) +
                                    "] = " + std::to_string(s) + " leaves the admissible set");
    return s;
}

inline double base_draw(const DistributionSpec& spec, RandomStream& stream, long long index) {
    switch (spec.family) {
        case DistFamily::constant:
            return spec.value;
        case DistFamily::exponential:
            return -std::log1p(-stream.next_uniform()) / spec.rate;
        case DistFamily::uniform:
            return spec.low + (spec.high - spec.low) * stream.next_uniform();
        case DistFamily::erlang: {
            double sum = 0.0;
            for (int i = 0; i < spec.shape; ++i)
                sum += -std::log1p(-stream.next_uniform()) / spec.rate;
            return sum;
        }
        case DistFamily::sequence:
            return spec.items[static_cast<size_t>(index) % spec.items.size()];
    }
    return 0.0;
}

}  // namespace detail

inline DurationSequence sample_durations(const DistributionSpec& spec,
                                         std::span<const double> theta, RandomStream& stream,
                                         int count) {
    if (count < 1) throw std::invalid_argument("sample_durations: count must be >= 1");
    validate(spec);
    const double scale = detail::theta_scale(spec, theta);
    DurationSequence out;
    out.reserve(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i)
        out.push_back(scale * detail::base_draw(spec, stream, i));
    return out;
}

// Draws with d(duration)/d(theta[active_coord]) attached: the unscaled base
// draw when this distribution binds the active coordinate, zero otherwise.
inline std::vector<Dual> sample_durations_dual(const DistributionSpec& spec,
                                               std::span<const double> theta, int active_coord,
                                               RandomStream& stream, int count) {
    if (count < 1) throw std::invalid_argument("sample_durations: count must be >= 1");
    validate(spec);
    const double scale = detail::theta_scale(spec, theta);
    const bool active = spec.theta_index >= 0 && spec.theta_index == active_coord;
    std::vector<Dual> out;
    out.reserve(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i) {
        double base = detail::base_draw(spec, stream, i);
        out.emplace_back(scale * base, active ? base : 0.0);
    }
    return out;
}

}  // namespace rqsim
