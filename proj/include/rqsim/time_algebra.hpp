#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rqsim {

// Forward-mode scalar for pathwise sensitivities: carries a value and its
// derivative with respect to one continuous decision parameter. max/min keep
// the winning operand's tangent; on an exact value tie the LEFT operand wins
// and the event is counted in dual_tie_events so callers can report it.
struct Dual {
    double v = 0.0;  // epoch or duration value
    double t = 0.0;  // d(value)/d(theta)

    constexpr Dual() = default;
    constexpr Dual(double value, double tangent = 0.0) : v(value), t(tangent) {}

    constexpr Dual operator-() const { return {-v, -t}; }

    constexpr Dual& operator+=(const Dual& o) { v += o.v; t += o.t; return *this; }
    constexpr Dual& operator-=(const Dual& o) { v -= o.v; t -= o.t; return *this; }

    friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend constexpr Dual operator*(const Dual& a, const Dual& b) {
        return {a.v * b.v, a.t * b.v + a.v * b.t};
    }
    friend constexpr Dual operator/(const Dual& a, const Dual& b) {
        return {a.v / b.v, (a.t * b.v - a.v * b.t) / (b.v * b.v)};
    }

    friend constexpr Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.t}; }
    friend constexpr Dual operator*(const Dual& a, double s) { return {a.v * s, a.t * s}; }
    friend constexpr Dual operator/(const Dual& a, double s) { return {a.v / s, a.t / s}; }
    friend constexpr Dual operator/(double s, const Dual& a) { return Dual{s} / a; }
    friend constexpr Dual operator+(const Dual& a, double s) { return {a.v + s, a.t}; }
    friend constexpr Dual operator+(double s, const Dual& a) { return {s + a.v, a.t}; }
    friend constexpr Dual operator-(const Dual& a, double s) { return {a.v - s, a.t}; }
    friend constexpr Dual operator-(double s, const Dual& a) { return {s - a.v, -a.t}; }

    // Ordering is by value only; tangents ride along.
    friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
    friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
    friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
};

// Ties resolved during the current propagation; reset by the caller that owns
// the run (see ipa.hpp). Thread-local so concurrent replications do not race.
inline thread_local std::uint64_t dual_tie_events = 0;

constexpr double value_of(double x) { return x; }
constexpr double value_of(const Dual& x) { return x.v; }

constexpr double tangent_of(double) { return 0.0; }
constexpr double tangent_of(const Dual& x) { return x.t; }

// max/min found by ADL from the templated engines ("using std::max" pattern).
inline Dual max(const Dual& a, const Dual& b) {
    if (a.v == b.v && a.t != b.t) ++dual_tie_events;
    return b.v > a.v ? b : a;
}

inline Dual min(const Dual& a, const Dual& b) {
    if (a.v == b.v && a.t != b.t) ++dual_tie_events;
    return b.v < a.v ? b : a;
}

template <class T>
constexpr T time_infinity() {
    return T(std::numeric_limits<double>::infinity());
}

}  // namespace rqsim
