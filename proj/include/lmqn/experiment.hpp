#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lmqn/compact.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/family.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/oracle.hpp"
#include "lmqn/pair_store.hpp"
#include "lmqn/qr_engine.hpp"
#include "lmqn/spectrum.hpp"

namespace lmqn {

/// Deterministic source of update pairs.  Entries are drawn uniformly from
/// the open interval (-1, 1) via the top 53 bits of a mt19937_64 stream, so
/// runs reproduce bit-for-bit across platforms; the stdlib real distribution
/// is implementation-defined and would not.
class PairGenerator {
public:
    explicit PairGenerator(std::uint64_t seed) : rng_(seed) {}

    double entry() {
        while (true) {
            const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
            const double x = 2.0 * u - 1.0;
            if (x != -1.0) return x;
        }
    }

    Vector draw(std::size_t n) {
        Vector v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = entry();
        return v;
    }

private:
    std::mt19937_64 rng_;
};

/// Draws `count` pairs acceptable to the family.  Convex-class pairs are
/// sign-corrected to positive curvature (s flipped when s'y < 0, exact zero
/// redrawn).  SR1 candidates must clear the update safeguard against the
/// matrix built from the pairs accepted so far, starting from gamma*I.
inline std::vector<Pair> generate_random_pairs(std::size_t n, std::size_t count,
                                               std::uint64_t seed,
                                               const UpdateFamily& family,
                                               double gamma = 3.0) {
    if (n == 0) throw DimensionError("generate_random_pairs: n must be positive");
    PairGenerator gen(seed);
    std::vector<Pair> out;
    out.reserve(count);
    PairBuffer accepted(n, count == 0 ? 1 : count);

    while (out.size() < count) {
        Vector s = gen.draw(n);
        Vector y = gen.draw(n);
        if (family.convex_class()) {
            const double sty = dot(s, y);
            if (sty == 0.0) continue;
            if (sty < 0.0)
                for (double& v : s) v = -v;
        } else {
            Vector bs;
            if (accepted.empty()) {
                bs = s;
                for (double& v : bs) v *= gamma;
            } else {
                const CompactForm form = build_sr1(accepted, gamma);
                const Matrix psi = assemble_psi(form.family, accepted, gamma);
                bs = apply_b(form, psi, s);
            }
            Vector r(n);
            for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - bs[i];
            if (!sr1_safe(s, r)) continue;
        }
        accepted.push(Pair{s, y});
        out.push_back(Pair{std::move(s), std::move(y)});
    }
    return out;
}

struct ExperimentConfig {
    std::size_t n = 100;
    std::size_t m = 5; // history capacity in pairs
    double gamma = 3.0;
    std::uint64_t seed = 1;
    UpdateFamily family = UpdateFamily::bfgs();
    int experiment = 1; // 1 scratch, 2 append, 3 slide
    bool with_oracle = true;
};

struct ExperimentReport {
    std::size_t n = 0;
    UpdateFamily family = UpdateFamily::bfgs();
    int experiment = 1;
    double re = std::numeric_limits<double>::quiet_NaN();
    double t_method = 0.0;
    double t_oracle = 0.0;
    std::size_t rebuilds = 0;    // scratch fallbacks after a rank failure
    std::size_t sr1_skipped = 0; // oracle-side suppressed SR1 updates
    Spectrum spectrum;
};

/// max_i |a_i - b_i| / max_i |b_i| over ascending spectra.
inline double relative_spectrum_error(const Vector& ours, const Vector& reference) {
    if (ours.size() != reference.size())
        throw DimensionError("relative_spectrum_error: lengths differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ours.size(); ++i) {
        num = std::max(num, std::abs(ours[i] - reference[i]));
        den = std::max(den, std::abs(reference[i]));
    }
    return (den == 0.0) ? num : num / den;
}

namespace detail {

inline Matrix leading_cols(const Matrix& a, std::size_t k) {
    Matrix out(a.rows(), k);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) = a(i, j);
    return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Appends the trailing `count` columns of `full` to the factor one by one;
/// the factor is assumed to currently represent the remaining prefix.
inline void append_trailing(ThinQR& qr, const Matrix& full, std::size_t count) {
    const std::size_t l = full.cols();
    for (std::size_t t = l - count; t < l; ++t)
        qr.append_column(leading_cols(full, t), full.col(t));
}

} // namespace detail

/// Runs one protocol instance.  Experiment 1 builds everything from scratch.
/// Experiment 2 grows the history by one pair, updating the factor by column
/// appends.  Experiment 3 slides the window: the oldest pair's columns leave
/// through Givens downdating, the new pair's enter through appends; a rank
/// failure falls back to a scratch factorization and is counted, never fatal.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment < 1 || cfg.experiment > 3)
        throw Error("run_experiment: experiment must be 1, 2 or 3");
    if (cfg.m == 0) throw Error("run_experiment: capacity must be positive");
    const std::size_t cpp = cfg.family.columns_per_pair();
    const std::size_t peak_pairs = (cfg.experiment == 2) ? cfg.m + 1 : cfg.m;
    if (peak_pairs * cpp > cfg.n)
        throw DimensionError("run_experiment: history exceeds dimension");

    const std::size_t total = (cfg.experiment == 1) ? cfg.m : cfg.m + 1;
    const std::vector<Pair> pairs =
        generate_random_pairs(cfg.n, total, cfg.seed, cfg.family, cfg.gamma);

    ExperimentReport rep;
    rep.n = cfg.n;
    rep.family = cfg.family;
    rep.experiment = cfg.experiment;

    PairBuffer buf(cfg.n, peak_pairs);
    ThinQR qr;

    if (cfg.experiment == 1) {
        const auto t0 = std::chrono::steady_clock::now();
        for (const Pair& p : pairs) buf.push(p);
        const CompactForm form = build_compact(cfg.family, buf, cfg.gamma);
        const Matrix psi = assemble_psi_shuffled(cfg.family, buf, cfg.gamma);
        qr = qr_from_scratch(psi);
        rep.spectrum = eigenvalues(form, qr, cfg.n);
        rep.t_method = detail::seconds_since(t0);
    } else {
        for (std::size_t k = 0; k < cfg.m; ++k) buf.push(pairs[k]);
        qr = qr_from_scratch(assemble_psi_shuffled(cfg.family, buf, cfg.gamma));

        const auto t0 = std::chrono::steady_clock::now();
        if (cfg.experiment == 2) {
            buf.push(pairs[cfg.m]);
            const Matrix full = assemble_psi_shuffled(cfg.family, buf, cfg.gamma);
            detail::append_trailing(qr, full, cpp);
        } else {
            buf.push(pairs[cfg.m]); // capacity m: evicts the oldest pair
            const Matrix full = assemble_psi_shuffled(cfg.family, buf, cfg.gamma);
            try {
                qr.delete_leading_columns(cpp);
                detail::append_trailing(qr, full, cpp);
            } catch (const RankError&) {
                qr = qr_from_scratch(full);
                rep.rebuilds += 1;
            }
        }
        const CompactForm form = build_compact(cfg.family, buf, cfg.gamma);
        rep.spectrum = eigenvalues(form, qr, cfg.n);
        rep.t_method = detail::seconds_since(t0);
    }

    if (cfg.with_oracle) {
        const auto t0 = std::chrono::steady_clock::now();
        const DenseBuild reference = dense_build(cfg.family, buf, cfg.gamma);
        const Vector ref_eigs = dense_eigenvalues(reference.b);
        rep.t_oracle = detail::seconds_since(t0);
        rep.sr1_skipped = reference.skipped.size();
        rep.re = relative_spectrum_error(rep.spectrum.all_eigenvalues(), ref_eigs);
    }
    return rep;
}

/// CSV column for phi: the convex weight for its family, blank for SR1.
inline std::string phi_field(const UpdateFamily& family) {
    if (!family.convex_class()) return "";
    std::ostringstream os;
    os << family.phi();
    return os.str();
}

inline void write_csv_header(std::ostream& os) {
    os << "n,family,phi,experiment,re,t_method,t_oracle\n";
}

inline void write_csv_row(std::ostream& os, const ExperimentReport& rep) {
    os << rep.n << ',' << rep.family.name() << ',' << phi_field(rep.family) << ','
       << rep.experiment << ',';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    if (std::isnan(rep.re))
        os << "";
    else
        os << rep.re;
    os << ',' << rep.t_method << ',' << rep.t_oracle << '\n';
}

inline void write_table_header(std::ostream& os) {
    os << std::left << std::setw(6) << "n" << std::setw(9) << "family" << std::setw(7)
       << "phi" << std::setw(5) << "exp" << std::setw(12) << "re" << std::setw(12)
       << "t_method" << std::setw(12) << "t_oracle" << '\n';
}

inline void write_table_row(std::ostream& os, const ExperimentReport& rep) {
    std::ostringstream re;
    if (std::isnan(rep.re))
        re << "-";
    else
        re << std::scientific << std::setprecision(2) << rep.re;
    std::ostringstream tm, to;
    tm << std::fixed << std::setprecision(4) << rep.t_method;
    if (rep.t_oracle > 0.0)
        to << std::fixed << std::setprecision(4) << rep.t_oracle;
    else
        to << "-";
    os << std::left << std::setw(6) << rep.n << std::setw(9) << rep.family.name()
       << std::setw(7) << phi_field(rep.family) << std::setw(5) << rep.experiment
       << std::setw(12) << re.str() << std::setw(12) << tm.str() << std::setw(12)
       << to.str() << '\n';
}

} // namespace lmqn
