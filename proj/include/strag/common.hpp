#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace strag {

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto process exit codes.
// ---------------------------------------------------------------------------

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A scheme was requested outside the parameter regime of its construction.
// The message names the violated condition.
struct regime_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct unsupported_plan_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct decode_error : std::runtime_error {
    decode_error(const std::string& msg, double kappa_, double residual_)
        : std::runtime_error(msg), kappa(kappa_), residual(residual_) {}
    double kappa;
    double residual;
};

// Closed form and brute-force metric disagree; always a hard failure.
struct mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Exact rational storage fractions (gamma = a1/a2 etc.).
// ---------------------------------------------------------------------------

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw parameter_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return a.num * b.den <= b.num * a.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }

    std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }

    // Parses "a/b" or a bare integer "a".
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s), 1);
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw parameter_error("cannot parse rational: " + s);
        }
    }
};

// ---------------------------------------------------------------------------
// Deterministic RNG. The generator and all value draws are hand-rolled so
// that a (seed, stream) pair produces identical output on every platform.
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
        // SplitMix64 warm-up so nearby seeds decorrelate.
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform on [-1, 1] excluding the dead zone |x| < floor, so random
    // coefficients can never silently shrink a support.
    double coefficient(double floor = 1e-3) {
        for (;;) {
            double x = uniform(-1.0, 1.0);
            if (x >= floor || x <= -floor) return x;
        }
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return next_u64() % n;
    }

    // Derives an independent stream, used to give workers/vectors their own
    // reproducible sub-generators regardless of draw order elsewhere.
    Rng fork(std::uint64_t stream) const {
        Rng r(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
        return r;
    }

  private:
    std::uint64_t state_;
};

inline long long lcm_ll(long long a, long long b) {
    return a / std::gcd(a, b) * b;
}

}  // namespace strag
