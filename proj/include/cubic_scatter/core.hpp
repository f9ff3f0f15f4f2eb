#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cubic_scatter {

using cx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt3 = 1.7320508075688772935;
inline constexpr cx I{0.0, 1.0};

/// Cube root of unity zeta_k, k in {1,2,3}. Indices are taken mod 3, so
/// zeta(4) == zeta(1) and zeta(0) == zeta(3).
[[nodiscard]] inline cx zeta(int k) {
    switch (((k - 1) % 3 + 3) % 3) {
    case 0: return {1.0, 0.0};
    case 1: return {-0.5, 0.5 * sqrt3};
    default: return {-0.5, -0.5 * sqrt3};
    }
}

/// Integer power of zeta_2 (zeta_2^n), exact on the lattice of cube roots.
[[nodiscard]] inline cx zeta2_pow(int n) { return zeta(1 + ((n % 3) + 3) % 3); }

/// Cyclic successor of an index in {1,2,3}.
[[nodiscard]] inline int next_index(int k) { return k % 3 + 1; }

/// f*(z) = conj(f(conj z)).
template <class F>
[[nodiscard]] cx star(F&& f, cx z) { return std::conj(f(std::conj(z))); }

// Error taxonomy. Each maps onto one failure mode named in the docs.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IndexNonZero : Error { using Error::Error; };
struct TooCloseToContour : Error { using Error::Error; };
struct ThetaOnContour : Error { using Error::Error; };
struct BracketFailure : Error { using Error::Error; };
struct NotABoundState : Error { using Error::Error; };
struct DegenerateM : Error { using Error::Error; };
struct NegativeN : Error { using Error::Error; };
struct ContinuationUnstable : Error { using Error::Error; };
struct StageError : Error {
    std::string stage;
    StageError(std::string stage_name, const std::string& what)
        : Error(stage_name + ": " + what), stage(std::move(stage_name)) {}
};
struct ConfigError : Error { using Error::Error; };

/// Worker count: CUBIC_SCATTER_THREADS if set, else hardware concurrency.
[[nodiscard]] inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CUBIC_SCATTER_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), hw * 4);
    }
    return hw;
}

/// Runs body(i) for i in [0, n). Iterations must be independent; results are
/// written by index so output is deterministic regardless of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nt = std::min<std::size_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace cubic_scatter
