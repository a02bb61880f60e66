#include "crossings/verdict.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <thread>

#include "crossings/errors.hpp"

namespace crossings {

namespace {

bool has_origin_feature(const FactoredTF& tf) {
    if (tf.integrator_order > 0) return true;
    for (const auto& f : tf.zero_factors)
        if (f[0] == 0.0) return true;
    for (const auto& f : tf.pole_factors)
        if (f[0] == 0.0) return true;
    return false;
}

double biproper_limit(const FactoredTF& tf) {
    double num = tf.gain, den = 1.0;
    for (const auto& f : tf.zero_factors) num *= f.leading();
    for (const auto& f : tf.pole_factors) den *= f.leading();
    return num / den;
}

std::string fmt_complex(Complex z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

// Runs f(0..n-1) across worker threads, results collected by index so the
// outcome does not depend on scheduling.
template <typename F>
void parallel_for(int n, F&& f) {
    int workers = std::min(n, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                f(i);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace

int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CROSSINGS_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v < static_cast<long>(hw)) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(hw);
}

int count_open_loop_rhp_poles(const FactoredTF& tf) {
    return count_open_loop_rhp_poles(tf, nullptr);
}

int count_open_loop_rhp_poles(const FactoredTF& tf, std::vector<std::string>* warnings) {
    int count = 0;
    if (tf.integrator_order > 0 && warnings)
        warnings->push_back("open-loop pole(s) at the origin are detoured, not counted as "
                            "right-half-plane poles");
    for (const auto& f : tf.pole_factors) {
        bool even_imag = f.degree() == 2 && f[1] == 0.0 && f[0] != 0.0 && f[0] * f[2] > 0.0;
        for (Complex r : factor_roots(f)) {
            bool structural = (r == Complex(0.0, 0.0) && f[0] == 0.0) || even_imag;
            double band = marginal_band(r);
            if (structural) {
                if (warnings)
                    warnings->push_back("open-loop pole at " + fmt_complex(r) +
                                        " lies on the imaginary axis and is detoured");
                continue;
            }
            if (std::abs(r.real()) <= band)
                throw MarginalPoleError("open-loop pole at " + fmt_complex(r) +
                                        " sits inside the marginal band of the imaginary "
                                        "axis without being structurally on it");
            if (r.real() > 0.0) ++count;
        }
    }
    return count;
}

OracleResult oracle_assess(const FactoredTF& tf) {
    OracleResult out;
    RationalTF r = expand(tf);
    RealPolynomial chi = r.num + r.den;
    int expected_degree = std::max(r.num.degree(), r.den.degree());

    if (chi.is_zero()) {
        out.indeterminate = true;
        out.note = "characteristic polynomial is identically zero";
        return out;
    }
    if (chi.degree() < expected_degree) {
        out.indeterminate = true;
        out.note = "characteristic polynomial drops degree; a closed-loop pole escapes to "
                   "infinity";
        return out;
    }

    bool roots_ok = false;
    try {
        RootSet rs = poly_roots(chi);
        int n = 0;
        bool on_axis = false;
        for (Complex z : rs.roots) {
            if (std::abs(z.real()) <= marginal_band(z)) on_axis = true;
            if (z.real() > 0.0) ++n;
        }
        if (on_axis) {
            out.indeterminate = true;
            out.note = "closed-loop root inside the marginal band of the imaginary axis";
        } else {
            out.closed_loop_rhp = n;
            roots_ok = true;
        }
    } catch (const Error& e) {
        out.indeterminate = true;
        out.note = std::string("root finding failed: ") + e.what();
    }

    try {
        out.routh_rhp = routh_rhp_count(chi);
    } catch (const IndeterminateError& e) {
        out.indeterminate = true;
        if (!out.note.empty()) out.note += "; ";
        out.note += std::string("array count indeterminate: ") + e.what();
    } catch (const Error& e) {
        out.indeterminate = true;
        if (!out.note.empty()) out.note += "; ";
        out.note += std::string("array count failed: ") + e.what();
    }

    if (!out.indeterminate && roots_ok && out.routh_rhp >= 0 &&
        out.routh_rhp != out.closed_loop_rhp) {
        out.indeterminate = true;
        out.note = "root count " + std::to_string(out.closed_loop_rhp) +
                   " and array count " + std::to_string(out.routh_rhp) + " disagree";
    }
    return out;
}

StabilityReport assess(const FactoredTF& tf, const AssessOptions& opts) {
    StabilityReport rep;
    rep.relative_degree = tf.relative_degree();
    rep.improper = rep.relative_degree < 0;

    auto finish = [&](StabilityReport& r) -> StabilityReport& {
        if (opts.run_oracle) {
            r.oracle = oracle_assess(tf);
            if (r.verdict.kind == VerdictKind::Marginal)
                r.oracle_agrees = r.oracle.indeterminate;
            else
                r.oracle_agrees = !r.oracle.indeterminate &&
                                  r.oracle.closed_loop_rhp == r.n_z;
        } else {
            r.oracle.note = "skipped";
            r.oracle_agrees = false;
        }
        return r;
    };
    auto marginal = [&](const std::string& reason) {
        rep.verdict.kind = VerdictKind::Marginal;
        rep.verdict.reason = reason;
        rep.verdict.n_z = 0;
        rep.n_z = 0;
        return finish(rep);
    };

    auto cancels = cancel_check(tf, opts.cancel_tol);
    if (!cancels.empty()) {
        try {
            rep.n_p = count_open_loop_rhp_poles(tf, &rep.warnings);
        } catch (const MarginalPoleError&) {
            rep.n_p = -1;
        }
        return marginal("zero at " + fmt_complex(cancels.front().zero) +
                        " nearly cancels pole at " + fmt_complex(cancels.front().pole));
    }

    try {
        rep.n_p = count_open_loop_rhp_poles(tf, &rep.warnings);
    } catch (const MarginalPoleError& e) {
        rep.n_p = -1;
        return marginal(e.what());
    }

    // flat on-ray approaches make the crossing direction undefined; bail out
    // before the detectors, whose counts would silently drop the event
    if (!has_origin_feature(tf)) {
        Complex l0 = eval_tf(tf, Complex(0.0, 0.0));
        if (l0.real() < -1.0 &&
            std::abs(l0 + 1.0) > opts.critical_tol_scale * (1.0 + std::abs(l0)) &&
            cusp_sign(tf, CuspAt::Zero) == 0)
            return marginal("response is flat on the critical ray at zero frequency");
    }
    if (rep.relative_degree == 0) {
        double c = biproper_limit(tf);
        if (c < -1.0 && std::abs(c + 1.0) > opts.critical_tol_scale * (1.0 + std::abs(c)) &&
            cusp_sign(tf, CuspAt::Infinity) == 0)
            return marginal("response is flat on the critical ray at infinite frequency");
    }

    NyquistContour contour = refine(build_contour(tf, opts.contour), tf, opts.contour);
    if (!contour.refinement_complete)
        rep.warnings.push_back("refinement budget reached; counts based on the partially "
                               "refined contour");
    MappedCurve curve = map_response(tf, contour);

    DetectOptions dopts;
    dopts.tol_scale = opts.critical_tol_scale;
    dopts.enable_cusp_handling = opts.enable_cusp_handling;
    NicholsDetectOptions nopts;
    nopts.tol_scale = opts.critical_tol_scale;
    nopts.enable_cusp_handling = opts.enable_cusp_handling;

    try {
        rep.nyquist_crossings = detect_ray_crossings(curve, tf, contour, dopts);
        rep.nichols_single_crossings =
            detect_nichols_crossings(to_nichols(curve, NicholsMode::Single), tf, contour, nopts);
        rep.nichols_multi_crossings =
            detect_nichols_crossings(to_nichols(curve, NicholsMode::Multiple), tf, contour,
                                     nopts);
        rep.n_by_method.nyquist = crossing_sum(rep.nyquist_crossings);
        rep.n_by_method.nichols_single = crossing_sum(rep.nichols_single_crossings);
        rep.n_by_method.nichols_multi = crossing_sum(rep.nichols_multi_crossings);
        rep.n_by_method.winding = winding_number(curve, opts.critical_tol_scale);
    } catch (const CriticalPointHitError& e) {
        return marginal(e.what());
    }

    const MethodCounts& n = rep.n_by_method;
    if (n.nyquist != n.nichols_single || n.nyquist != n.nichols_multi ||
        n.nyquist != n.winding)
        throw MethodDisagreementError(
            "crossing counts diverge: complex-plane " + std::to_string(n.nyquist) +
            ", single-sheet chart " + std::to_string(n.nichols_single) +
            ", multi-sheet chart " + std::to_string(n.nichols_multi) + ", winding " +
            std::to_string(n.winding));

    rep.n_z = n.nyquist + rep.n_p;
    if (rep.n_z < 0)
        throw MethodDisagreementError("net crossing count " + std::to_string(n.nyquist) +
                                      " implies " + std::to_string(rep.n_z) +
                                      " closed-loop right-half-plane poles");

    if (rep.n_z == 0) {
        rep.verdict.kind = VerdictKind::Stable;
        rep.verdict.n_z = 0;
    } else {
        rep.verdict.kind = VerdictKind::Unstable;
        rep.verdict.n_z = rep.n_z;
    }
    return finish(rep);
}

std::vector<SweepEntry> gain_sweep(const FactoredTF& tf, const std::vector<double>& gains,
                                   const AssessOptions& opts) {
    std::vector<SweepEntry> out(gains.size());
    std::vector<std::exception_ptr> errors(gains.size());
    parallel_for(static_cast<int>(gains.size()), [&](int i) {
        out[i].gain = gains[i];
        try {
            out[i].report = assess(tf.with_gain(gains[i]), opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

FactoredTF random_plant(std::uint64_t seed, int max_order) {
    std::mt19937_64 rng(seed);
    auto unif = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    auto log_unif = [&](double a, double b) {
        return std::exp(unif(std::log(a), std::log(b)));
    };
    auto chance = [&](double p) { return unif(0.0, 1.0) < p; };

    if (max_order < 1) max_order = 1;
    int den_order = std::uniform_int_distribution<int>(1, max_order)(rng);
    int num_order = std::uniform_int_distribution<int>(0, den_order)(rng);

    FactoredTF tf;
    tf.gain = log_unif(0.1, 100.0) * (chance(0.3) ? -1.0 : 1.0);
    if (den_order >= 2 && chance(0.25)) {
        tf.integrator_order = 1;
        den_order -= 1;
    }

    auto make_factors = [&](int budget, std::vector<RealPolynomial>& dst, double p_rhp) {
        while (budget > 0) {
            if (budget >= 2 && chance(0.4)) {
                double r = log_unif(0.1, 10.0);
                double ang = unif(95.0, 175.0);  // degrees from positive real axis
                if (chance(p_rhp)) ang = 180.0 - ang;
                double re = r * std::cos(ang * 3.14159265358979323846 / 180.0);
                dst.push_back(RealPolynomial({r * r, -2.0 * re, 1.0}));
                budget -= 2;
            } else {
                double r = log_unif(0.1, 10.0);
                if (chance(p_rhp)) r = -r;
                // root at -r: factor (s/r + 1) style, kept monic-free like the parser
                dst.push_back(RealPolynomial({1.0, 1.0 / r}));
                budget -= 1;
            }
        }
    };
    make_factors(num_order, tf.zero_factors, 0.3);
    make_factors(den_order, tf.pole_factors, 0.3);
    return tf;
}

namespace {

enum class FuzzStatus { Agree, Disagree, Marginal, Numeric };

FuzzStatus fuzz_status(const FactoredTF& tf) {
    try {
        RationalTF r = expand(tf);
        RealPolynomial chi = r.num + r.den;
        if (chi.is_zero() || chi.degree() < std::max(r.num.degree(), r.den.degree()))
            return FuzzStatus::Marginal;
        for (Complex z : poly_roots(chi).roots)
            if (std::abs(z.real()) <= 1e-6 * std::max(1.0, std::abs(z)))
                return FuzzStatus::Marginal;  // too close to the axis to trust either side

        StabilityReport rep = assess(tf);
        if (rep.verdict.kind == VerdictKind::Marginal) return FuzzStatus::Marginal;
        if (rep.oracle.indeterminate) return FuzzStatus::Marginal;
        return rep.n_z == rep.oracle.closed_loop_rhp ? FuzzStatus::Agree
                                                     : FuzzStatus::Disagree;
    } catch (const MethodDisagreementError&) {
        return FuzzStatus::Disagree;
    } catch (const IndeterminateError&) {
        return FuzzStatus::Marginal;
    } catch (const Error&) {
        return FuzzStatus::Numeric;
    } catch (const std::exception&) {
        return FuzzStatus::Numeric;
    }
}

FactoredTF shrink_disagreement(FactoredTF tf) {
    for (;;) {
        bool shrunk = false;
        std::vector<FactoredTF> candidates;
        for (std::size_t i = 0; i < tf.zero_factors.size(); ++i) {
            FactoredTF c = tf;
            c.zero_factors.erase(c.zero_factors.begin() + i);
            candidates.push_back(std::move(c));
        }
        for (std::size_t i = 0; i < tf.pole_factors.size(); ++i) {
            FactoredTF c = tf;
            c.pole_factors.erase(c.pole_factors.begin() + i);
            candidates.push_back(std::move(c));
        }
        if (tf.integrator_order > 0) {
            FactoredTF c = tf;
            c.integrator_order -= 1;
            candidates.push_back(std::move(c));
        }
        for (auto& c : candidates) {
            if (c.pole_factors.empty() && c.integrator_order == 0 && c.zero_factors.empty())
                continue;
            if (fuzz_status(c) == FuzzStatus::Disagree) {
                tf = std::move(c);
                shrunk = true;
                break;
            }
        }
        if (!shrunk) return tf;
    }
}

}  // namespace

FuzzResult fuzz_verify(std::uint64_t seed, int count, int max_order) {
    FuzzResult result;
    result.total = count;
    std::vector<FuzzStatus> status(count, FuzzStatus::Numeric);
    std::vector<FactoredTF> plants(count);
    parallel_for(count, [&](int i) {
        plants[i] = random_plant(seed + static_cast<std::uint64_t>(i), max_order);
        status[i] = fuzz_status(plants[i]);
    });
    for (int i = 0; i < count; ++i) {
        switch (status[i]) {
            case FuzzStatus::Agree:
                ++result.decided;
                ++result.agreements;
                break;
            case FuzzStatus::Disagree:
                ++result.decided;
                result.disagreements.push_back(shrink_disagreement(plants[i]));
                break;
            case FuzzStatus::Marginal:
                ++result.skipped_marginal;
                break;
            case FuzzStatus::Numeric:
                ++result.skipped_numeric;
                break;
        }
    }
    return result;
}

}  // namespace crossings
