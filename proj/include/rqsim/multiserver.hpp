#pragma once

// The G/G/m queue: A_k = A_{k-1} + alpha_k, C_k = max(A_k, D_{k-m}) + tau_k,
// and D_k = min over k-subsets of {C_1..C_{k+m-2}} of the subset maximum,
// capped by C_{k+m-1}. The minimum over k-subset maxima is the k-th smallest
// of the pool, so the engine maintains a running order statistic; the literal
// subset enumeration is kept as a test oracle.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "rqsim/errors.hpp"
#include "rqsim/time_algebra.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

namespace detail {

// Selects the current k-th smallest of a growing pool. Elements are ordered
// by (value, insertion index), so equal values resolve to the earliest
// insertion; for Dual runs that is the deterministic tie rule, and boundary
// ties are counted as tie events.
template <class T>
class RunningOrderStatistic {
public:
    void push(T x) {
        Entry e{x, next_index_++};
        if (!low_.empty() && before(e, low_.top())) {
            low_.push(e);
        } else {
            high_.push(e);
        }
        rebalance();
    }

    void raise_rank() {
        ++rank_;
        rebalance();
    }

    long long size() const { return static_cast<long long>(low_.size() + high_.size()); }
    long long rank() const { return rank_; }
    bool has_rank() const { return static_cast<long long>(low_.size()) == rank_; }

    // Value at the current rank; callers must check has_rank() first.
    T current() {
        if constexpr (std::is_same_v<T, Dual>) {
            if (!high_.empty() && value_of(low_.top().value) == value_of(high_.top().value) &&
                tangent_of(low_.top().value) != tangent_of(high_.top().value))
                ++dual_tie_events;
        }
        return low_.top().value;
    }

private:
    struct Entry {
        T value;
        std::uint64_t index;
    };
    static bool before(const Entry& a, const Entry& b) {
        if (value_of(a.value) != value_of(b.value))
            return value_of(a.value) < value_of(b.value);
        return a.index < b.index;
    }
    struct LowCmp {  // max-heap of the rank_ smallest
        bool operator()(const Entry& a, const Entry& b) const { return before(a, b); }
    };
    struct HighCmp {  // min-heap of the rest
        bool operator()(const Entry& a, const Entry& b) const { return before(b, a); }
    };

    void rebalance() {
        while (static_cast<long long>(low_.size()) < rank_ && !high_.empty()) {
            low_.push(high_.top());
            high_.pop();
        }
        while (static_cast<long long>(low_.size()) > rank_) {
            high_.push(low_.top());
            low_.pop();
        }
    }

    std::priority_queue<Entry, std::vector<Entry>, LowCmp> low_;
    std::priority_queue<Entry, std::vector<Entry>, HighCmp> high_;
    long long rank_ = 0;
    std::uint64_t next_index_ = 0;
};

}  // namespace detail

// Full sample path of the G/G/m queue. completions[k] is the service
// completion of the k-th arriving customer; departures[0] is the departure
// sequence in time order (it is not attributed to particular customers).
template <class T>
SamplePath<T> simulate_ggm(const GGmSpec& spec, std::span<const T> interarrivals,
                           std::span<const T> services, int horizon) {
    using std::max;
    using std::min;
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("ggm: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_durations(services, horizon, "services");

    const int m = spec.server_count;
    SamplePath<T> path;
    path.horizon = horizon;
    path.arrivals.resize(1);
    path.departures.resize(1);
    auto& arr = path.arrivals[0];
    auto& dep = path.departures[0];
    auto& comp = path.completions;
    arr.reserve(horizon);
    dep.reserve(horizon);
    comp.reserve(horizon);

    T a = T{};
    for (int k = 0; k < horizon; ++k) {
        a = a + interarrivals[static_cast<size_t>(k)];
        arr.push_back(a);
    }

    detail::RunningOrderStatistic<T> pool;
    int completed = 0;  // completions realized so far
    auto realize_completion = [&](int j) {  // 1-based customer index
        while (completed < j && completed < horizon) {
            int idx = completed;  // customer idx+1
            T free_at = idx + 1 - m >= 1 ? dep[static_cast<size_t>(idx - m)] : T{};
            comp.push_back(max(arr[static_cast<size_t>(idx)], free_at) +
                           services[static_cast<size_t>(idx)]);
            ++completed;
        }
    };

    int pooled = 0;  // completions pushed into the order-statistic pool
    for (int k = 1; k <= horizon; ++k) {
        realize_completion(std::min(k + m - 1, horizon));
        int pool_target = std::min(k + m - 2, horizon);
        while (pooled < pool_target) {
            pool.push(comp[static_cast<size_t>(pooled)]);
            ++pooled;
        }
        pool.raise_rank();
        T d = time_infinity<T>();
        if (pool.has_rank()) d = pool.current();
        if (k + m - 1 <= horizon) d = min(d, comp[static_cast<size_t>(k + m - 2)]);
        dep.push_back(d);
    }
    return path;
}

// Literal evaluation of the departure formula: the minimum over all k-subsets
// {j_1 < ... < j_k} of {1..k+m-2} of max(C_{j_1}..C_{j_k}), capped by
// C_{k+m-1}. Completions beyond the sequence are +infinity. Test oracle only;
// enumeration is refused above the guard.
inline Epoch departure_bruteforce(std::span<const double> completions, int m, int k,
                                  std::uint64_t subset_guard = 1'000'000) {
    if (m < 1) throw std::invalid_argument("departure_bruteforce: m must be >= 1");
    if (k < 1) throw std::invalid_argument("departure_bruteforce: k must be >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    auto at = [&](int j) {  // 1-based
        return j <= static_cast<int>(completions.size()) ? completions[static_cast<size_t>(j - 1)]
                                                         : inf;
    };

    const int pool = k + m - 2;
    std::uint64_t count = 1;  // C(pool, k), guarded
    for (int i = 1; i <= k; ++i) {
        count = count * static_cast<std::uint64_t>(pool - k + i) / static_cast<std::uint64_t>(i);
        if (count > subset_guard)
            throw std::invalid_argument("departure_bruteforce: subset count exceeds guard");
    }

    double best = inf;
    if (pool >= k) {
        std::vector<int> idx(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i + 1;
        while (true) {
            double subset_max = -inf;
            for (int j : idx) subset_max = std::max(subset_max, at(j));
            best = std::min(best, subset_max);
            int i = k - 1;
            while (i >= 0 && idx[static_cast<size_t>(i)] == pool - (k - 1 - i)) --i;
            if (i < 0) break;
            ++idx[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
        }
    }
    return std::min(best, at(k + m - 1));
}

// Direct (non-incremental) evaluation of the fast-path formula:
// min(k-th smallest of C_1..C_{k+m-2}, C_{k+m-1}). Used to cross-check the
// subset enumeration on arbitrary sequences.
inline Epoch ggm_departure_fastpath(std::span<const double> completions, int m, int k) {
    if (m < 1) throw std::invalid_argument("ggm_departure_fastpath: m must be >= 1");
    if (k < 1) throw std::invalid_argument("ggm_departure_fastpath: k must be >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    const int pool = k + m - 2;
    std::vector<double> head;
    head.reserve(static_cast<size_t>(std::max(pool, 0)));
    for (int j = 1; j <= pool; ++j)
        head.push_back(j <= static_cast<int>(completions.size())
                           ? completions[static_cast<size_t>(j - 1)]
                           : inf);
    double rank_value = inf;
    if (static_cast<int>(head.size()) >= k) {
        std::nth_element(head.begin(), head.begin() + (k - 1), head.end());
        rank_value = head[static_cast<size_t>(k - 1)];
    }
    double tail = k + m - 1 <= static_cast<int>(completions.size())
                      ? completions[static_cast<size_t>(k + m - 2)]
                      : inf;
    return std::min(rank_value, tail);
}

}  // namespace rqsim
