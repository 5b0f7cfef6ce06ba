#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmqn/lmqn.hpp"

namespace {

std::vector<lmqn::UpdateFamily> pick_families(const std::vector<std::string>& names,
                                              double phi) {
    using lmqn::UpdateFamily;
    if (names.empty())
        return {UpdateFamily::bfgs(), UpdateFamily::dfp(), UpdateFamily::sr1(),
                UpdateFamily::broyden(phi)};
    std::vector<UpdateFamily> out;
    for (const std::string& name : names) {
        if (name == "bfgs") out.push_back(UpdateFamily::bfgs());
        else if (name == "dfp") out.push_back(UpdateFamily::dfp());
        else if (name == "sr1") out.push_back(UpdateFamily::sr1());
        else out.push_back(UpdateFamily::broyden(phi));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectra of limited-memory quasi-Newton matrices in compact form"};

    std::vector<std::string> family_names;
    double phi = 0.5;
    std::vector<std::size_t> sizes;
    std::size_t m = 5;
    double gamma = 3.0;
    std::uint64_t seed = 1;
    std::string experiment = "all";
    std::string csv_path;
    bool no_oracle = false;
    double re_gate = 1e-13;
    std::string load_s, load_y;

    app.add_option("--family", family_names,
                   "update family: bfgs, dfp, sr1, broyden (repeatable; default all)")
        ->check(CLI::IsMember({"bfgs", "dfp", "sr1", "broyden"}));
    app.add_option("--phi", phi, "convex weight for the broyden family")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--n", sizes, "problem dimension (repeatable; default 100 500 1000)");
    auto* m_opt = app.add_option("--m", m, "history capacity in pairs");
    app.add_option("--gamma", gamma, "base curvature: B0 = gamma I")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for the deterministic pair stream");
    app.add_option("--experiment", experiment,
                   "protocol: 1 scratch, 2 append, 3 slide, or all")
        ->check(CLI::IsMember({"1", "2", "3", "all"}));
    app.add_option("--csv", csv_path, "also write results as CSV to this path");
    app.add_flag("--no-oracle", no_oracle, "skip the dense reference computation");
    app.add_option("--re-gate", re_gate,
                   "largest acceptable relative spectrum error (exit status)");
    auto* s_opt = app.add_option("--load-s", load_s, "text matrix of step columns");
    auto* y_opt = app.add_option("--load-y", load_y,
                                 "text matrix of gradient-difference columns");
    s_opt->needs(y_opt);
    y_opt->needs(s_opt);

    CLI11_PARSE(app, argc, argv);

    if (sizes.empty()) sizes = {100, 500, 1000};
    std::vector<int> experiments;
    if (experiment == "all") experiments = {1, 2, 3};
    else experiments = {experiment[0] - '0'};

    const std::vector<lmqn::UpdateFamily> families = pick_families(family_names, phi);

    std::vector<lmqn::ExperimentReport> reports;
    try {
        if (!load_s.empty()) {
            // user-supplied pairs: scratch analysis per family on the final window
            const lmqn::Matrix s = lmqn::load_matrix(load_s);
            const lmqn::Matrix y = lmqn::load_matrix(load_y);
            const std::size_t capacity =
                (m_opt->count() > 0) ? m : (s.cols() ? s.cols() : 1);
            for (const lmqn::UpdateFamily& family : families) {
                lmqn::PairBuffer buf = lmqn::buffer_from_columns(s, y, capacity);
                lmqn::ExperimentReport rep;
                rep.n = buf.n();
                rep.family = family;
                rep.experiment = 1;
                const auto t0 = std::chrono::steady_clock::now();
                const lmqn::CompactForm form = lmqn::build_compact(family, buf, gamma);
                const lmqn::ThinQR qr = lmqn::qr_from_scratch(
                    lmqn::assemble_psi_shuffled(family, buf, gamma));
                rep.spectrum = lmqn::eigenvalues(form, qr, buf.n());
                rep.t_method = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
                if (!no_oracle) {
                    const auto t1 = std::chrono::steady_clock::now();
                    const lmqn::DenseBuild ref = lmqn::dense_build(family, buf, gamma);
                    const lmqn::Vector ref_eigs = lmqn::dense_eigenvalues(ref.b);
                    rep.t_oracle = std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - t1)
                                       .count();
                    rep.sr1_skipped = ref.skipped.size();
                    rep.re = lmqn::relative_spectrum_error(
                        rep.spectrum.all_eigenvalues(), ref_eigs);
                }
                reports.push_back(std::move(rep));
            }
        } else {
            for (std::size_t n : sizes)
                for (const lmqn::UpdateFamily& family : families)
                    for (int exp_id : experiments) {
                        lmqn::ExperimentConfig cfg;
                        cfg.n = n;
                        cfg.m = m;
                        cfg.gamma = gamma;
                        cfg.seed = seed;
                        cfg.family = family;
                        cfg.experiment = exp_id;
                        cfg.with_oracle = !no_oracle;
                        reports.push_back(lmqn::run_experiment(cfg));
                    }
        }
    } catch (const lmqn::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }

    lmqn::write_table_header(std::cout);
    for (const lmqn::ExperimentReport& rep : reports)
        lmqn::write_table_row(std::cout, rep);

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) {
            std::cerr << "error: cannot write " << csv_path << '\n';
            return 2;
        }
        lmqn::write_csv_header(csv);
        for (const lmqn::ExperimentReport& rep : reports)
            lmqn::write_csv_row(csv, rep);
    }

    if (no_oracle) {
        std::cout << "completed " << reports.size() << " runs (oracle skipped)\n";
        return 0;
    }
    double worst = 0.0;
    for (const lmqn::ExperimentReport& rep : reports)
        worst = std::max(worst, rep.re);
    const bool ok = worst <= re_gate;
    std::cout << "completed " << reports.size() << " runs, max re " << std::scientific
              << worst << ", gate " << re_gate << ": " << (ok ? "pass" : "FAIL")
              << '\n';
    return ok ? 0 : 1;
}
