// stats.hpp
// The arithmetic-statistics engine over coefficient tables: divisibility
// counts pi*(x, delta) and pi(x, delta), the zero count Z(x), the main
// divisor sum S(x) = sum d(a(p)) with its divisor-enumeration oracle,
// Chebotarev ratio reports, the restricted lower-bound sum, and the
// log-log regression for the S(x) ~ B x (log x)^v question.
//
// Every public operation re-checks the coefficient bound on the entries
// it reads before using them.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/arith.hpp"
#include "hecke/coeffs.hpp"
#include "hecke/errors.hpp"
#include "hecke/gl2.hpp"
#include "hecke/int128.hpp"
#include "hecke/parallel.hpp"

namespace hecke {

class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

struct CountTriple {
    u64 pi_star = 0;     // p <= x with a(p) = 0 mod delta (zeros included)
    u64 pi_nonzero = 0;  // same but a(p) != 0
    u64 zero_count = 0;  // p <= x with a(p) = 0
};

namespace detail {

inline void check_entry_bound(const CoefficientTable& t, u64 p, i128 a) {
    if (!deligne_bound_holds(p, a, t.form.weight))
        throw TableBoundError("coefficient bound violated at p = " + std::to_string(p));
}

}  // namespace detail

// Exact counts over good primes p <= x. Divisibility by delta includes
// a(p) = 0; p dividing delta is not excluded (finitely many primes, and
// the definitions count them).
inline CountTriple counts(const CoefficientTable& t, u64 x, u64 delta) {
    if (x > t.x_max) throw std::out_of_range("counts: x exceeds table range");
    if (delta < 1) throw std::invalid_argument("counts: delta must be >= 1");
    const u64 n = t.good_prime_count(x);
    CountTriple r;
    const i128 d = i128(delta);
    for (u64 i = 0; i < n; ++i) {
        auto [p, a] = t.entries[i];
        detail::check_entry_bound(t, p, a);
        if (a == 0) {
            ++r.zero_count;
            ++r.pi_star;
        } else if (a % d == 0) {
            ++r.pi_star;
            ++r.pi_nonzero;
        }
    }
    return r;
}

// S(x) at several checkpoints with one factorization pass. Results are
// independent of the worker count (per-entry work, ordered prefix sums).
inline std::vector<u64> divisor_sum_checkpoints(const CoefficientTable& t,
                                                std::span<const u64> xs, unsigned threads = 1) {
    u64 x_top = 0;
    for (u64 x : xs) {
        if (x > t.x_max) throw std::out_of_range("divisor_sum: x exceeds table range");
        x_top = std::max(x_top, x);
    }
    const u64 n = t.good_prime_count(x_top);
    std::vector<u64> dval(n);
    for_each_block(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto [p, a] = t.entries[i];
            detail::check_entry_bound(t, p, a);
            dval[i] = a == 0 ? 0 : divisor_count(a);
        }
    });
    std::vector<u64> prefix(n + 1, 0);
    for (u64 i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + dval[i];
    std::vector<u64> out;
    out.reserve(xs.size());
    for (u64 x : xs) out.push_back(prefix[t.good_prime_count(x)]);
    return out;
}

// S(x) = sum over good p <= x, a(p) != 0, of d(a(p)).
inline u64 divisor_sum(const CoefficientTable& t, u64 x, unsigned threads = 1) {
    const u64 xs[1] = {x};
    return divisor_sum_checkpoints(t, xs, threads)[0];
}

// Independent oracle for divisor_sum: enumerate the divisors of every
// |a(p)|, then recount each divisor class through counts() and sum
// pi(x, delta) over all divisors seen. Feasible when every |a(p)| fits
// a machine word.
inline u64 divisor_sum_identity(const CoefficientTable& t, u64 x) {
    if (x > t.x_max) throw std::out_of_range("divisor_sum_identity: x exceeds table range");
    const u64 n = t.good_prime_count(x);
    std::map<u64, u64> tally;  // divisor -> #{p : divisor | a(p), a(p) != 0}
    for (u64 i = 0; i < n; ++i) {
        auto [p, a] = t.entries[i];
        detail::check_entry_bound(t, p, a);
        if (a == 0) continue;
        if (abs_u128(a) >> 64)
            throw CapacityError("divisor_sum_identity: |a(p)| too large for divisor enumeration");
        for (u128 d : divisors(factor(a))) ++tally[u64(d)];
    }
    u64 total = 0;
    for (auto [delta, seen] : tally) {
        CountTriple c = counts(t, x, delta);
        if (c.pi_nonzero != seen)
            throw std::logic_error("divisor_sum_identity: cross-count mismatch at delta = " +
                                   std::to_string(delta));
        total += c.pi_nonzero;
    }
    return total;
}

struct ReportRow {
    u64 key = 0;        // delta
    u64 observed = 0;   // pi*(x, delta) or pi(x, delta) depending on the experiment
    DensityValue h;     // formula density (1/1 for delta = 1)
    double predicted = 0;
    double ratio = 0;
    bool flagged = false;  // delta touches an exceptional prime of the form
};

struct ExperimentReport {
    std::string form;  // descriptor
    bool cm = false;
    u64 x = 0;
    u64 good_primes = 0;
    std::vector<ReportRow> rows;
    u64 total_observed = 0;
    double total_predicted = 0;
    double ratio = 0;
    double h_sum = 0;  // partial sum of h over the reported delta
};

namespace detail {

inline bool touches_exceptional(const FormSpec& form, u64 delta) {
    for (u64 q : form.exceptional_primes)
        if (delta % q == 0) return true;
    return false;
}

}  // namespace detail

// pi*(x, delta) against the Chebotarev main term h(delta) pi(x), with
// pi(x) normalized to good primes. Exceptional moduli are flagged, not
// dropped.
inline ExperimentReport chebotarev_report(const CoefficientTable& t, u64 x,
                                          std::span<const u64> moduli) {
    ExperimentReport rep;
    rep.form = t.form.descriptor();
    rep.cm = t.form.cm;
    rep.x = x;
    rep.good_primes = t.good_prime_count(x);
    for (u64 delta : moduli) {
        if (delta < 2) throw std::invalid_argument("chebotarev_report: moduli must be >= 2");
        ReportRow row;
        row.key = delta;
        row.observed = counts(t, x, delta).pi_star;
        row.h = density_h(delta);
        row.predicted = row.h.value() * double(rep.good_primes);
        row.ratio = row.predicted > 0 ? double(row.observed) / row.predicted : 0.0;
        row.flagged = detail::touches_exceptional(t.form, delta);
        rep.rows.push_back(row);
        rep.total_observed += row.observed;
        rep.total_predicted += row.predicted;
        rep.h_sum += row.h.value();
    }
    rep.ratio = rep.total_predicted > 0 ? double(rep.total_observed) / rep.total_predicted : 0.0;
    return rep;
}

// Least prime with full image: the smallest prime outside the form's
// exceptional list.
inline u64 default_ell0(const FormSpec& form) {
    for (u64 p : detail::small_primes())
        if (!std::binary_search(form.exceptional_primes.begin(), form.exceptional_primes.end(),
                                p))
            return p;
    throw std::logic_error("default_ell0: exceptional list covers all small primes");
}

// Restricted sum over delta < x^exponent whose prime factors are all
// >= ell0 (delta = 1 included with h(1) := 1; it contributes
// pi(x) - Z(x)). Reports sum pi(x, delta), sum h(delta) pi(x) and their
// ratio. ell0 = 0 selects the form default.
inline ExperimentReport lower_bound_sum(const CoefficientTable& t, u64 x, u64 ell0 = 0,
                                        double exponent = 1.0 / 12.0) {
    if (exponent <= 0 || exponent > 1)
        throw std::invalid_argument("lower_bound_sum: exponent must be in (0, 1]");
    if (ell0 == 0) ell0 = default_ell0(t.form);

    const double bound = std::pow(double(x), exponent);
    if (bound > 1e7) throw CapacityError("lower_bound_sum: delta range too large");

    ExperimentReport rep;
    rep.form = t.form.descriptor();
    rep.cm = t.form.cm;
    rep.x = x;
    rep.good_primes = t.good_prime_count(x);

    // smallest-prime-factor sieve over [2, bound)
    const u64 cap = bound <= 2 ? 1 : u64(std::ceil(bound)) - 1;  // enumerate delta <= cap, delta < bound
    std::vector<u64> spf(cap + 1, 0);
    for (u64 i = 2; i <= cap; ++i)
        if (spf[i] == 0)
            for (u64 j = i; j <= cap; j += i)
                if (spf[j] == 0) spf[j] = i;

    for (u64 delta = 1; double(delta) < bound && delta <= cap + 1; ++delta) {
        if (delta > 1) {
            u64 m = delta;
            bool ok = true;
            while (m > 1) {
                u64 q = spf[m];
                if (q < ell0) {
                    ok = false;
                    break;
                }
                while (m % q == 0) m /= q;
            }
            if (!ok) continue;
        }
        ReportRow row;
        row.key = delta;
        CountTriple c = counts(t, x, delta);
        row.observed = c.pi_nonzero;
        row.h = delta == 1 ? DensityValue{1, 1} : density_h(delta);
        row.predicted = row.h.value() * double(rep.good_primes);
        row.ratio = row.predicted > 0 ? double(row.observed) / row.predicted : 0.0;
        row.flagged = delta > 1 && detail::touches_exceptional(t.form, delta);
        rep.rows.push_back(row);
        rep.total_observed += row.observed;
        rep.total_predicted += row.predicted;
        rep.h_sum += row.h.value();
    }
    rep.ratio = rep.total_predicted > 0 ? double(rep.total_observed) / rep.total_predicted : 0.0;
    return rep;
}

struct FitResult {
    double B = 0;
    double v = 0;
    double residual = 0;  // RMS in log space
};

// Least-squares fit of log(S/x) = log B + v log log x over checkpoints
// (x_i, S_i). Needs two distinct x >= 16 and positive S.
inline FitResult fit_conjecture(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw FitError("fit_conjecture: need at least 2 points");
    double su = 0, sy = 0, suu = 0, suy = 0;
    for (auto [x, s] : points) {
        if (x < 16) throw std::invalid_argument("fit_conjecture: x must be >= 16");
        if (s <= 0) throw std::invalid_argument("fit_conjecture: S must be positive");
        double u = std::log(std::log(x));
        double y = std::log(s / x);
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
    }
    const double n = double(points.size());
    const double denom = n * suu - su * su;
    if (std::abs(denom) < 1e-12 * std::max(1.0, n * suu))
        throw FitError("fit_conjecture: degenerate design (all x equal)");
    FitResult fit;
    fit.v = (n * suy - su * sy) / denom;
    const double b0 = (sy - fit.v * su) / n;
    fit.B = std::exp(b0);
    double ss = 0;
    for (auto [x, s] : points) {
        double r = std::log(s / x) - (b0 + fit.v * std::log(std::log(x)));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace hecke
